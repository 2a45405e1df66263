#include "memdiscern/trace.hpp"

#include "memdiscern/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memdiscern {

void validate(const Trace& trace) {
    const std::size_t n = trace.size();
    if (trace.v.size() != n || trace.i.size() != n) {
        fail(ErrorKind::Data, "trace columns differ in length");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(trace.t[k]) || !std::isfinite(trace.v[k]) || !std::isfinite(trace.i[k])) {
            fail(ErrorKind::Data, "trace sample " + std::to_string(k) + " is not finite");
        }
        if (k > 0 && !(trace.t[k] > trace.t[k - 1])) {
            fail(ErrorKind::Data, "trace times not strictly increasing at sample " + std::to_string(k));
        }
    }
    if (trace.level_index.empty() && trace.dwell_index.empty()) {
        return;
    }
    if (trace.level_index.size() != n || trace.dwell_index.size() != n) {
        fail(ErrorKind::Data, "trace dwell annotations must cover every sample");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (trace.dwell_index[k] < 1) {
            fail(ErrorKind::Data, "dwell_index below 1 at sample " + std::to_string(k));
        }
        if (k == 0) {
            continue;
        }
        const bool new_level = trace.level_index[k] != trace.level_index[k - 1];
        const bool reset = trace.dwell_index[k] == 1;
        if (new_level != reset) {
            fail(ErrorKind::Data, "dwell_index must reset exactly when level_index increments (sample " +
                                      std::to_string(k) + ")");
        }
        if (new_level && trace.level_index[k] != trace.level_index[k - 1] + 1) {
            fail(ErrorKind::Data, "level_index must increment by one (sample " + std::to_string(k) + ")");
        }
    }
}

Trace slice(const Trace& trace, std::size_t first, std::size_t last) {
    last = std::min(last, trace.size());
    first = std::min(first, last);
    Trace out;
    out.meta = trace.meta;
    out.t.assign(trace.t.begin() + first, trace.t.begin() + last);
    out.v.assign(trace.v.begin() + first, trace.v.begin() + last);
    out.i.assign(trace.i.begin() + first, trace.i.begin() + last);
    if (trace.has_dwell_annotations()) {
        out.level_index.assign(trace.level_index.begin() + first, trace.level_index.begin() + last);
        out.dwell_index.assign(trace.dwell_index.begin() + first, trace.dwell_index.begin() + last);
    }
    return out;
}

}  // namespace memdiscern
