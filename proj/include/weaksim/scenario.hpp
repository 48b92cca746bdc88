#pragma once

#include "weaksim/measurement.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace weaksim {

enum class Backend { exact, first_order, weak_exp };

Backend parse_backend(const std::string& name);
std::string backend_name(Backend backend);

// One fully specified run: system states + observable, grid, pointer
// preparation, and the coupling.  Loaded from an INI-style file with
// [system], [grid], [pointer], [coupling] sections (see README for the
// key list).
struct Scenario {
    std::string id = "scenario";
    CouplingSpec coupling;
    Grid grid{};
    Backend backend = Backend::exact;
    double overlap_threshold = kDefaultOverlapThreshold;

    // Pointer preparation: either a Gaussian recipe or a tabulated file.
    double sigma = 1.0;
    double chirp = 0.0;
    double q0 = 0.0;
    double p0 = 0.0;
    std::string state_file; // non-empty: load amplitudes instead

    std::vector<double> potential; // empty means V = 0
};

// Builds the initial pointer state the scenario describes.
PointerState scenario_pointer(const Scenario& scenario);

Scenario parse_scenario(std::istream& in, const std::string& fallback_id);
Scenario load_scenario(const std::string& path);

// --- value parsers (shared with the CLI) ------------------------------------

// Complex literals in "a+bi" form: "1", "-2.5", "i", "-i", "3i", "1+2i",
// "1.5e-3-2e-4i".  Whitespace is ignored.
cplx parse_complex(const std::string& text);

// Comma-separated complex entries.
std::vector<cplx> parse_complex_list(const std::string& text);

// Semicolon-separated rows of comma-separated complex entries.
Eigen::MatrixXcd parse_complex_matrix(const std::string& text);

// Accepts a named observable (pauli-x|pauli-y|pauli-z|identity), an inline
// matrix ("1,0;0,-1"), or a path to a file holding one matrix row per line.
Observable resolve_observable(const std::string& value);

// Comma/whitespace-separated reals, possibly spread over multiple lines.
std::vector<double> load_real_samples(const std::string& path);

} // namespace weaksim
