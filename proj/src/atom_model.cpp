#include "eitlab/atom_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "eitlab/errors.hpp"

namespace eit {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPoleThreshold = 1e-30;

constexpr int idx(int row, int col) { return 3 * row + col; }

Matrix3c projector(int row, int col) {
    Matrix3c m = Matrix3c::Zero();
    m(row, col) = 1.0;
    return m;
}

// vec(A ρ B) = S vec(ρ) for row-major vec.
Liouvillian sandwich(const Matrix3c& left, const Matrix3c& right) {
    Liouvillian s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    s(idx(i, j), idx(k, l)) = left(i, k) * right(l, j);
    return s;
}

Liouvillian commutator_term(const Matrix3c& h) {
    const Matrix3c id = Matrix3c::Identity();
    return -I * (sandwich(h, id) - sandwich(id, h));
}

Liouvillian lindblad_term(const Matrix3c& jump) {
    const Matrix3c id = Matrix3c::Identity();
    const Matrix3c ldl = jump.adjoint() * jump;
    return sandwich(jump, jump.adjoint()) - 0.5 * (sandwich(ldl, id) + sandwich(id, ldl));
}

// Parameter-independent pieces; the Liouvillian is a linear combination.
struct SuperOperatorBasis {
    Liouvillian excited_energy;   // from H = |a><a|
    Liouvillian c_energy;         // from H = |c><c|
    Liouvillian signal_coupling;  // from H = |a><b| + |b><a|
    Liouvillian pump_coupling;    // from H = |a><c| + |c><a|
    Liouvillian decay_to_b;
    Liouvillian decay_to_c;
    Liouvillian exchange;
    Liouvillian dephasing;

    SuperOperatorBasis() {
        excited_energy = commutator_term(projector(0, 0));
        c_energy = commutator_term(projector(2, 2));
        signal_coupling = commutator_term(projector(0, 1) + projector(1, 0));
        pump_coupling = commutator_term(projector(0, 2) + projector(2, 0));
        decay_to_b = lindblad_term(projector(1, 0));
        decay_to_c = lindblad_term(projector(2, 0));
        exchange = lindblad_term(projector(2, 1)) + lindblad_term(projector(1, 2));
        dephasing = Liouvillian::Zero();
        dephasing(idx(1, 2), idx(1, 2)) = -1.0;
        dephasing(idx(2, 1), idx(2, 1)) = -1.0;
    }
};

const SuperOperatorBasis& basis() {
    static const SuperOperatorBasis b;
    return b;
}

// Classical rate graph over the populations {a, b, c}. The stationary state
// is unique only if exactly one closed communicating class exists.
bool has_unique_stationary_state(const LambdaSystem& sys) {
    std::array<std::array<bool, 3>, 3> edge{};
    edge[0][1] = sys.gamma_b_decay > 0.0;
    edge[0][2] = sys.gamma_c_decay > 0.0;
    edge[1][2] = edge[2][1] = sys.gamma_pe > 0.0;
    edge[1][0] = sys.omega_b != 0.0;
    edge[2][0] = sys.omega_c != 0.0;

    auto reach = edge;
    for (int i = 0; i < 3; ++i) reach[i][i] = true;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);

    // A state is in a closed class iff everything it reaches reaches it back.
    std::array<bool, 3> closed{};
    for (int i = 0; i < 3; ++i) {
        closed[i] = true;
        for (int j = 0; j < 3; ++j)
            if (reach[i][j] && !reach[j][i]) closed[i] = false;
    }
    int classes = 0;
    std::array<bool, 3> counted{};
    for (int i = 0; i < 3; ++i) {
        if (!closed[i] || counted[i]) continue;
        ++classes;
        for (int j = 0; j < 3; ++j)
            if (reach[i][j]) counted[j] = true;
    }
    return classes == 1;
}

// Liouvillian with the ρ_aa equation replaced by the trace condition.
Liouvillian trace_constrained(Liouvillian l) {
    l.row(0).setZero();
    l(0, idx(0, 0)) = 1.0;
    l(0, idx(1, 1)) = 1.0;
    l(0, idx(2, 2)) = 1.0;
    return l;
}

using Vector9c = Eigen::Matrix<cplx, 9, 1>;

bool all_finite(const Vector9c& v) {
    return std::all_of(v.data(), v.data() + 9,
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void require_unique(const LambdaSystem& sys) {
    if (!has_unique_stationary_state(sys))
        throw SingularLiouvillian("stationary manifold is degenerate: ground states are not connected");
}

Matrix3c unvec(const Vector9c& v) {
    Matrix3c m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = v(idx(i, j));
    return m;
}

}  // namespace

void LambdaSystem::validate() const {
    const std::array<double, 8> fields{omega_b, omega_c, delta_pump, delta2,
                                       gamma_b_decay, gamma_c_decay, gamma_bc, gamma_pe};
    for (double f : fields)
        if (!std::isfinite(f)) throw ConfigError("LambdaSystem: non-finite field");
    if (gamma_b_decay < 0 || gamma_c_decay < 0 || gamma_bc < 0 || gamma_pe < 0)
        throw ConfigError("LambdaSystem: decay and decoherence rates must be >= 0");
    if (omega_c < 0) throw ConfigError("LambdaSystem: pump Rabi frequency must be >= 0");
    if (!(gamma() > 0)) throw ConfigError("LambdaSystem: excited-state decay rate must be > 0");
}

void require_weak_signal(const LambdaSystem& sys) {
    if (sys.allow_strong_signal) return;
    if (std::abs(sys.omega_b) > std::abs(sys.omega_c) / 5.0) {
        std::ostringstream os;
        os << "weak-signal condition violated: |omega_b| = " << std::abs(sys.omega_b)
           << " rad/s exceeds |omega_c|/5 = " << std::abs(sys.omega_c) / 5.0 << " rad/s";
        throw ValidityError(os.str());
    }
}

DensityMatrix3::DensityMatrix3(const Matrix3c& rho) {
    const double scale = rho.cwiseAbs().maxCoeff();
    raw_defect_ = scale > 0 ? (rho - rho.adjoint()).cwiseAbs().maxCoeff() / scale : 0.0;
    m_ = 0.5 * (rho + rho.adjoint());
    m_ /= m_.trace().real();
}

double DensityMatrix3::hermiticity_defect() const { return raw_defect_; }

cplx coherence_per_signal(const LambdaSystem& sys) {
    sys.validate();
    const cplx two_photon{sys.delta2, sys.gamma_bc};  // δ₂ + iγ_bc
    if (std::abs(two_photon) < kPoleThreshold)
        throw PoleError("linear_coherence: i*gamma_bc + delta2 vanishes (two-photon pole)");
    const cplx denom = (sys.delta_pump - sys.delta2) + sys.omega_c * sys.omega_c / two_photon -
                       I * (0.5 * sys.gamma());
    return 1.0 / denom;
}

cplx linear_coherence(const LambdaSystem& sys) {
    require_weak_signal(sys);
    return sys.omega_b * coherence_per_signal(sys);
}

Liouvillian liouvillian(const LambdaSystem& sys) {
    const auto& b = basis();
    const double delta = sys.signal_detuning();
    // H = δ|a><a| − δ₂|c><c| − Ω_b(|a><b| + h.c.) − Ω_c(|a><c| + h.c.)
    Liouvillian l = delta * b.excited_energy - sys.delta2 * b.c_energy -
                    sys.omega_b * b.signal_coupling - sys.omega_c * b.pump_coupling;
    l += sys.gamma_b_decay * b.decay_to_b + sys.gamma_c_decay * b.decay_to_c;
    if (sys.gamma_pe != 0.0) l += sys.gamma_pe * b.exchange;
    if (sys.gamma_bc != 0.0) l += sys.gamma_bc * b.dephasing;
    return l;
}

namespace {

// One entry of liouvillian(sys) without assembling the full operator.
cplx liouvillian_entry(const LambdaSystem& sys, int row, int col) {
    const auto& b = basis();
    return sys.signal_detuning() * b.excited_energy(row, col) - sys.delta2 * b.c_energy(row, col) -
           sys.omega_b * b.signal_coupling(row, col) - sys.omega_c * b.pump_coupling(row, col) +
           sys.gamma_b_decay * b.decay_to_b(row, col) + sys.gamma_c_decay * b.decay_to_c(row, col) +
           sys.gamma_pe * b.exchange(row, col) + sys.gamma_bc * b.dephasing(row, col);
}

}  // namespace

DensityMatrix3 bloch_steady_state(const LambdaSystem& sys) {
    sys.validate();
    require_unique(sys);
    Vector9c rhs = Vector9c::Zero();
    rhs(0) = 1.0;
    const Vector9c rho = trace_constrained(liouvillian(sys)).partialPivLu().solve(rhs);
    if (!all_finite(rho)) throw SingularLiouvillian("bloch_steady_state: singular linear system");
    return DensityMatrix3(unvec(rho));
}

DensityMatrix3 pumped_steady_state(const LambdaSystem& sys) {
    LambdaSystem unperturbed = sys;
    unperturbed.omega_b = 0.0;
    unperturbed.validate();
    require_unique(unperturbed);

    // a–c coherence decays at Γ/2 (spontaneous) + γ_pe/2 (exchange out of c).
    const double g_ac = 0.5 * (sys.gamma() + sys.gamma_pe);
    const double om = sys.omega_c;
    const double lorentz = g_ac * g_ac + sys.delta_pump * sys.delta_pump;
    const double rate = 2.0 * om * om * g_ac;  // pumping rate R times `lorentz`
    const double q = rate / (rate + sys.gamma() * lorentz);  // ρ_aa/ρ_cc = R/(R + Γ)
    const double denom = sys.gamma_pe * (2.0 + q) + sys.gamma_b_decay * q;
    const double pc = sys.gamma_pe / denom;
    const double pa = q * pc;
    const double pb = (sys.gamma_pe + sys.gamma_b_decay * q) / denom;

    Matrix3c rho = Matrix3c::Zero();
    rho(0, 0) = pa;
    rho(1, 1) = pb;
    rho(2, 2) = pc;
    rho(0, 2) = I * om * (pc - pa) / cplx(g_ac, sys.delta_pump);
    rho(2, 0) = std::conj(rho(0, 2));
    return DensityMatrix3(rho);
}

cplx bloch_linear_response(const LambdaSystem& sys) {
    LambdaSystem unperturbed = sys;
    unperturbed.omega_b = 0.0;
    const DensityMatrix3 rho0 = pumped_steady_state(unperturbed);

    // L = L0 + Ω_b L1 with L1 = −signal_coupling; first order: L0 ρ1 = −L1 ρ0.
    // |b> is untouched by L0's coherent part, so (ρ_ab, ρ_cb) evolve as a closed
    // block and the 2×2 solve is exact.
    const int ab = idx(0, 1);
    const int cb = idx(2, 1);
    const auto& coupling = basis().signal_coupling;
    auto source = [&](int row) {
        cplx acc{0.0, 0.0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) acc += coupling(row, idx(i, j)) * rho0.matrix()(i, j);
        return acc;
    };
    const cplx m00 = liouvillian_entry(unperturbed, ab, ab);
    const cplx m01 = liouvillian_entry(unperturbed, ab, cb);
    const cplx m10 = liouvillian_entry(unperturbed, cb, ab);
    const cplx m11 = liouvillian_entry(unperturbed, cb, cb);
    const cplx det = m00 * m11 - m01 * m10;
    const cplx rho_ab = (source(ab) * m11 - m01 * source(cb)) / det;
    if (!std::isfinite(rho_ab.real()) || !std::isfinite(rho_ab.imag()))
        throw SingularLiouvillian("bloch_linear_response: singular linear system");
    return rho_ab;
}

WeakSignalExtrapolation extrapolate_weak_signal(const LambdaSystem& sys, double rel_tol,
                                                int max_halvings) {
    sys.validate();
    const double start = sys.omega_c > 0 ? sys.omega_c / 100.0 : sys.gamma() / 100.0;
    auto ratio = [&](double h) {
        LambdaSystem probe = sys;
        probe.omega_b = h;
        return bloch_steady_state(probe)(Level::a, Level::b) / h;
    };
    // ρ_ab/Ω_b is even in Ω_b, so the leading error is O(h²).
    auto richardson = [](cplx coarse, cplx fine) { return (4.0 * fine - coarse) / 3.0; };

    double h = start;
    cplx r_coarse = ratio(h);
    cplx r_fine = ratio(h / 2);
    cplx previous = richardson(r_coarse, r_fine);
    WeakSignalExtrapolation out{previous, h / 2, 0, 1.0};
    for (int k = 1; k <= max_halvings; ++k) {
        h /= 2;
        r_coarse = r_fine;
        r_fine = ratio(h / 2);
        const cplx current = richardson(r_coarse, r_fine);
        const double change = std::abs(current - previous) / std::abs(current);
        out = {current, h / 2, k, change};
        if (change <= rel_tol) break;
        previous = current;
    }
    return out;
}

}  // namespace eit
