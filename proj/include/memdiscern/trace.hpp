#pragma once

#include "memdiscern/circuit_models.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace memdiscern {

enum class TraceSource { Measured, Simulated };

struct TraceMeta {
    std::string device_id;
    std::optional<double> electrode_width_mm;
    TraceSource source = TraceSource::Measured;
    std::optional<CircuitTopology> topology;
};

/// Time-ordered (t, V, I) record, stored column-wise.
struct Trace {
    std::vector<double> t;  // seconds
    std::vector<double> v;  // applied volts
    std::vector<double> i;  // total amperes
    std::vector<int> level_index;
    std::vector<int> dwell_index;
    TraceMeta meta;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    bool has_dwell_annotations() const { return !dwell_index.empty(); }

    void push_back(double time, double volts, double amps) {
        t.push_back(time);
        v.push_back(volts);
        i.push_back(amps);
    }
};

// Strictly increasing times, finite values, consistent annotations.
// Throws ErrorKind::Data.
void validate(const Trace& trace);

// Keeps samples [first, last) including annotations.
Trace slice(const Trace& trace, std::size_t first, std::size_t last);

}  // namespace memdiscern
