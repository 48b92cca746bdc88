#include "weaksim/scenario.hpp"

#include "weaksim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace weaksim {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string strip_spaces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

double parse_real_strict(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw BadScenario(what + ": trailing junk in '" + text + "'");
        return v;
    } catch (const BadScenario&) {
        throw;
    } catch (const std::exception&) {
        throw BadScenario(what + ": cannot parse '" + text + "' as a number");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap read_sections(std::istream& in) {
    SectionMap sections;
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw BadScenario("scenario line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw BadScenario("scenario line " + std::to_string(line_no) +
                                  ": empty section name");
            sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw BadScenario("scenario line " + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        if (section.empty())
            throw BadScenario("scenario line " + std::to_string(line_no) +
                              ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw BadScenario("scenario line " + std::to_string(line_no) +
                              ": empty key");
        sections[section][key] = value;
    }
    return sections;
}

const std::string* find_key(const SectionMap& sections,
                            const std::string& section,
                            const std::string& key) {
    const auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

std::string require_key(const SectionMap& sections, const std::string& section,
                        const std::string& key) {
    const std::string* v = find_key(sections, section, key);
    if (!v)
        throw BadScenario("scenario: missing [" + section + "] " + key);
    return *v;
}

} // namespace

Backend parse_backend(const std::string& name) {
    if (name == "exact") return Backend::exact;
    if (name == "first-order") return Backend::first_order;
    if (name == "weak-exp") return Backend::weak_exp;
    throw BadScenario("unknown backend '" + name +
                      "' (want exact|first-order|weak-exp)");
}

std::string backend_name(Backend backend) {
    switch (backend) {
        case Backend::exact: return "exact";
        case Backend::first_order: return "first-order";
        case Backend::weak_exp: return "weak-exp";
    }
    throw BadScenario("unknown backend enum value");
}

cplx parse_complex(const std::string& text) {
    const std::string s = strip_spaces(text);
    if (s.empty()) throw BadScenario("complex: empty literal");

    if (s.back() != 'i' && s.back() != 'I')
        return cplx(parse_real_strict(s, "complex"), 0.0);

    const std::string body = s.substr(0, s.size() - 1);
    // Split the imaginary tail from a possible real head at the last +/-
    // that is not an exponent sign.
    std::size_t split_at = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' &&
            body[i - 1] != 'E')
            split_at = i;
    }
    std::string real_part, imag_part;
    if (split_at == std::string::npos) {
        imag_part = body;
    } else {
        real_part = body.substr(0, split_at);
        imag_part = body.substr(split_at);
    }
    double im;
    if (imag_part.empty() || imag_part == "+")
        im = 1.0;
    else if (imag_part == "-")
        im = -1.0;
    else
        im = parse_real_strict(imag_part, "complex imaginary part");
    const double re =
        real_part.empty() ? 0.0 : parse_real_strict(real_part, "complex real part");
    return cplx(re, im);
}

std::vector<cplx> parse_complex_list(const std::string& text) {
    std::vector<cplx> out;
    for (const auto& part : split(text, ',')) {
        const std::string t = trim(part);
        if (t.empty()) throw BadScenario("complex list: empty entry");
        out.push_back(parse_complex(t));
    }
    return out;
}

Eigen::MatrixXcd parse_complex_matrix(const std::string& text) {
    const auto rows = split(text, ';');
    std::vector<std::vector<cplx>> values;
    for (const auto& row : rows) {
        const std::string t = trim(row);
        if (t.empty()) continue;
        values.push_back(parse_complex_list(t));
    }
    if (values.empty()) throw BadScenario("matrix: no rows");
    const std::size_t cols = values.front().size();
    for (const auto& row : values)
        if (row.size() != cols)
            throw BadScenario("matrix: ragged rows");
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(values.size()),
                       static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < values.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                values[r][c];
    return m;
}

Observable resolve_observable(const std::string& value) {
    const std::string v = trim(value);
    if (v == "pauli-x" || v == "pauli-y" || v == "pauli-z" || v == "identity")
        return named_observable(v);
    if (v.find(';') != std::string::npos || v.find(',') != std::string::npos)
        return make_observable(parse_complex_matrix(v));

    std::ifstream in(v);
    if (!in)
        throw BadScenario("observable: '" + v +
                          "' is neither a known name nor a readable file");
    std::string text, line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (!text.empty()) text += ';';
        text += line;
    }
    return make_observable(parse_complex_matrix(text));
}

std::vector<double> load_real_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<double> out;
    std::string token;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        while (row >> token)
            out.push_back(parse_real_strict(token, path));
    }
    return out;
}

PointerState scenario_pointer(const Scenario& scenario) {
    if (!scenario.state_file.empty())
        return load_pointer(scenario.grid, scenario.state_file);
    return make_gaussian(scenario.grid, scenario.q0, scenario.p0,
                         scenario.sigma, scenario.chirp);
}

Scenario parse_scenario(std::istream& in, const std::string& fallback_id) {
    const SectionMap sections = read_sections(in);
    for (const auto& [name, keys] : sections) {
        (void)keys;
        if (name != "system" && name != "grid" && name != "pointer" &&
            name != "coupling")
            throw BadScenario("scenario: unknown section [" + name + "]");
    }

    Scenario s;
    s.id = fallback_id;

    // [system]
    s.coupling.observable =
        resolve_observable(require_key(sections, "system", "observable"));
    const auto to_vector = [](const std::string& text) {
        const auto list = parse_complex_list(text);
        Eigen::VectorXcd v(static_cast<Eigen::Index>(list.size()));
        for (std::size_t i = 0; i < list.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = list[i];
        return v;
    };
    s.coupling.psi_i = make_state(to_vector(require_key(sections, "system", "psi_i")));
    s.coupling.psi_f = make_state(to_vector(require_key(sections, "system", "psi_f")));
    if (const auto* v = find_key(sections, "system", "overlap_threshold"))
        s.overlap_threshold = parse_real_strict(*v, "overlap_threshold");

    // [grid]
    const double n_points =
        parse_real_strict(require_key(sections, "grid", "n_points"), "n_points");
    const double length =
        parse_real_strict(require_key(sections, "grid", "length"), "length");
    s.grid = build_grid(static_cast<std::size_t>(n_points), length);

    // [pointer]
    if (const auto* v = find_key(sections, "pointer", "sigma"))
        s.sigma = parse_real_strict(*v, "sigma");
    if (const auto* v = find_key(sections, "pointer", "chirp"))
        s.chirp = parse_real_strict(*v, "chirp");
    if (const auto* v = find_key(sections, "pointer", "q0"))
        s.q0 = parse_real_strict(*v, "q0");
    if (const auto* v = find_key(sections, "pointer", "p0"))
        s.p0 = parse_real_strict(*v, "p0");
    if (const auto* v = find_key(sections, "pointer", "mass"))
        s.coupling.mass = parse_real_strict(*v, "mass");
    if (const auto* v = find_key(sections, "pointer", "state_file"))
        s.state_file = *v;
    if (const auto* v = find_key(sections, "pointer", "potential")) {
        for (const auto& part : split(*v, ','))
            s.potential.push_back(parse_real_strict(trim(part), "potential"));
    }
    if (const auto* v = find_key(sections, "pointer", "potential_file"))
        s.potential = load_real_samples(*v);
    if (!s.potential.empty() && s.potential.size() != s.grid.n_points)
        throw BadScenario("scenario: potential has " +
                          std::to_string(s.potential.size()) +
                          " samples, grid has " +
                          std::to_string(s.grid.n_points));

    // [coupling]
    s.coupling.g = parse_real_strict(require_key(sections, "coupling", "g"), "g");
    if (const auto* v = find_key(sections, "coupling", "backend"))
        s.backend = parse_backend(*v);
    if (const auto* v = find_key(sections, "coupling", "id")) s.id = *v;

    if (!(s.coupling.mass > 0.0))
        throw BadScenario("scenario: mass must be positive");
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path);
    // Default id: file name without directory or extension.
    std::string stem = path;
    const auto slash = stem.find_last_of("/\\");
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_scenario(in, stem.empty() ? "scenario" : stem);
}

} // namespace weaksim
