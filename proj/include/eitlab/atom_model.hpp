#pragma once

#include <complex>

#include <Eigen/Core>

namespace eit {

using cplx = std::complex<double>;

/// Three-level Λ atom: excited |a>, ground states |b> (signal) and |c> (pump).
/// All fields are angular frequencies in rad/s.
struct LambdaSystem {
    double omega_b = 0.0;        ///< signal Rabi frequency Ω_b
    double omega_c = 0.0;        ///< pump Rabi frequency Ω_c (real, >= 0)
    double delta_pump = 0.0;     ///< pump detuning Δ
    double delta2 = 0.0;         ///< two-photon detuning δ₂ = Δ − δ
    double gamma_b_decay = 0.0;  ///< spontaneous decay a -> b
    double gamma_c_decay = 0.0;  ///< spontaneous decay a -> c
    double gamma_bc = 0.0;       ///< ground-state dephasing
    double gamma_pe = 0.0;       ///< b <-> c population exchange (0 = pure dephasing)

    /// Linear-response operations reject |Ω_b| > |Ω_c|/5 unless this is set.
    bool allow_strong_signal = false;

    /// Excited-state inverse lifetime Γ = Γ_b + Γ_c.
    double gamma() const { return gamma_b_decay + gamma_c_decay; }
    /// Signal detuning δ = Δ − δ₂.
    double signal_detuning() const { return delta_pump - delta2; }

    /// Throws ConfigError on negative rates, Γ <= 0, or non-finite fields.
    void validate() const;
};

/// Throws ValidityError when the weak-signal condition |Ω_b| <= |Ω_c|/5 fails
/// and the override is not set.
void require_weak_signal(const LambdaSystem& sys);

enum class Level : int { a = 0, b = 1, c = 2 };

using Matrix3c = Eigen::Matrix<cplx, 3, 3>;
using Liouvillian = Eigen::Matrix<cplx, 9, 9>;

/// Steady-state density matrix over the basis (a, b, c).
class DensityMatrix3 {
public:
    /// Hermitizes and normalizes to unit trace.
    explicit DensityMatrix3(const Matrix3c& rho);

    cplx operator()(Level row, Level col) const {
        return m_(static_cast<int>(row), static_cast<int>(col));
    }
    double population(Level l) const { return (*this)(l, l).real(); }
    const Matrix3c& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }

    /// Largest |ρ − ρ†| entry of the solver output, relative to its largest entry.
    double hermiticity_defect() const;

private:
    Matrix3c m_;
    double raw_defect_ = 0.0;
};

/// ρ_ab^(1)/Ω_b from the first-order expression
///     1 / (Δ − δ₂ + |Ω_c|²/(iγ_bc + δ₂) − iΓ/2).
/// No weak-signal check; throws PoleError when |iγ_bc + δ₂| < 1e-30.
cplx coherence_per_signal(const LambdaSystem& sys);

/// First-order signal coherence ρ_ab^(1) = Ω_b · coherence_per_signal(sys).
/// Throws ValidityError (weak-signal) or PoleError.
cplx linear_coherence(const LambdaSystem& sys);

/// Rotating-frame Liouvillian acting on row-major vec(ρ) (index 3i + j).
Liouvillian liouvillian(const LambdaSystem& sys);

/// Unique stationary state of the master equation with decay a->b (Γ_b),
/// a->c (Γ_c), ρ_bc dephasing (γ_bc) and symmetric b<->c exchange (γ_pe).
/// Throws SingularLiouvillian if the stationary manifold is not one-dimensional.
DensityMatrix3 bloch_steady_state(const LambdaSystem& sys);

/// Stationary state at Ω_b = 0 in closed form: the pump drives a two-level
/// a–c system that decays and exchanges into b. Agrees with bloch_steady_state
/// for Ω_b = 0 but keeps every entry at full relative precision, including the
/// small ρ_ac and ρ_cc of a strongly pumped medium. Ignores sys.omega_b.
DensityMatrix3 pumped_steady_state(const LambdaSystem& sys);

/// dρ_ab/dΩ_b at Ω_b = 0, from first-order perturbation of the Liouvillian
/// around the signal-free steady state. Ignores sys.omega_b.
cplx bloch_linear_response(const LambdaSystem& sys);

struct WeakSignalExtrapolation {
    cplx coherence_per_signal;  ///< extrapolated lim ρ_ab/Ω_b as Ω_b -> 0
    double final_step;          ///< smallest Ω_b used
    int halvings;               ///< number of step halvings performed
    double change;              ///< relative change between last two estimates
};

/// Richardson extrapolation of ρ_ab/Ω_b from full steady states. Starts with
/// Ω_b ∈ {h, h/2}, h = Ω_c/100 (Γ/100 when Ω_c = 0), and keeps halving until
/// successive extrapolants agree to `rel_tol` or `max_halvings` is reached.
WeakSignalExtrapolation extrapolate_weak_signal(const LambdaSystem& sys,
                                                double rel_tol = 1e-9,
                                                int max_halvings = 40);

}  // namespace eit
