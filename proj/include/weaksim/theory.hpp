#pragma once

#include "weaksim/pointer.hpp"
#include "weaksim/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace weaksim {

// First-order post-selected pointer shifts for weak value A_w = a + ib:
//   <q>_f = <q>_i + g a + g b m (dVar_q/dt)
//   <p>_f = <p>_i + 2 g b Var_p
struct ShiftPrediction {
    double delta_q = 0.0;
    double delta_p = 0.0;
    double mean_q_f = 0.0;
    double mean_p_f = 0.0;
};

ShiftPrediction predict_shifts(const WeakValue& w, double g,
                               const PointerState& pointer, double mass);

// Pointer observable built from position-diagonal and momentum-diagonal
// factors, applied left to right:  M phi = f1(f2(...(fn phi))).
// Each factor is q^power or p^power.  Hermiticity of the product is checked
// against random state pairs at construction time; products like q*p that
// fail <phi|M chi> == <M phi|chi> are rejected.
class PointerObservable {
  public:
    static PointerObservable position();
    static PointerObservable momentum();
    static PointerObservable position_squared();

    struct Factor {
        bool in_position_space = true; // false: momentum-diagonal
        int power = 1;
    };

    static PointerObservable composite(std::vector<Factor> factors);

    cvec apply(const Grid& grid, const cvec& amplitudes) const;
    double expectation(const PointerState& state) const;
    const std::string& label() const { return label_; }

  private:
    PointerObservable(std::vector<Factor> factors, std::string label);
    void check_hermitian() const;

    std::vector<Factor> factors_;
    std::string label_;
};

// General first-order response of any pointer observable M:
//   <M>_f = <M>_i + i g a <[p, M]>_i + g b (<pM + Mp>_i - 2 <p>_i <M>_i)
// The commutator expectation i<[p,M]> must come out real; its imaginary
// residue is checked against 1e-10.
double predict_general_observable(const WeakValue& w, double g,
                                  const PointerState& pointer,
                                  const PointerObservable& m);

// Detects the two degenerate regimes of the shift law and reports the
// reduced per-g coefficients that survive in each:
//   (i)  real weak value (b = 0): delta_q/g = a, delta_p = 0
//   (ii) real pointer (S' == 0 where defined): delta_q/g = a,
//        delta_p/g = 2 b Var_p
struct CaseReport {
    bool real_weak_value = false;
    bool real_pointer = false;
    std::optional<double> delta_q_per_g;
    std::optional<double> delta_p_per_g;
    std::string summary;
};

CaseReport special_case_checks(const WeakValue& w, const PointerState& pointer,
                               double mass);

} // namespace weaksim
