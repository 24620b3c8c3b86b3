#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/matcore.hpp"
#include "bjac/pivot.hpp"
#include "bjac/random.hpp"
#include "bjac/rotations.hpp"
#include "bjac/ubc.hpp"

namespace bjac {

enum class CoreKind { random_generalized_serial, classical };

struct SolverConfig {
    PivotOrdering ordering;  ///< empty means column_cyclic(m)
    double rho = 1.0;
    double tol = 1e-13;
    std::size_t max_cycles = 30;
    bool use_attr_R = true;
    bool preprocess = true;
    /// Also require |a_rs| <= tol * sqrt(|a_rr a_ss|) for every off-diagonal entry (Hermitian and J-Hermitian).
    bool relative_stop = true;
    CoreKind core = CoreKind::random_generalized_serial;
    std::uint64_t seed = 0;
    CoreOptions core_options{};
    std::string strategy_id;
};

inline void validate(const SolverConfig& c) {
    if (!(c.rho > 0.0 && c.rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
    if (c.max_cycles < 1) throw ConfigError("max_cycles must be at least 1");
}

/// The pivot submatrix core did not converge; `snapshot` holds the submatrix it was given.
class CoreNonConvergence : public Error {
public:
    CoreNonConvergence(const std::string& what, cmat snapshot) : Error(what), snapshot(std::move(snapshot)) {}
    cmat snapshot;
};

struct StepRecord {
    std::size_t cycle = 0;  ///< 1-based cycle number
    std::size_t step = 0;   ///< global step index k
    PivotPair pair;
    double off2_before = 0.0;
    double off2_after = 0.0;
    double annihilated = 0.0;  ///< 2||A_ij||^2 + off^2(A_ii) + off^2(A_jj) before the step
    double frob_after = 0.0;
    double perturbation = 0.0;  ///< ||E^(k)||_F, perturbed process only
    UbcSource ubc = UbcSource::none;
    bool hyperbolic = false;
};

using StepObserver = std::function<void(const StepRecord&, const cmat&)>;

struct ConvergenceTrace {
    std::vector<double> per_step_off;
    std::vector<double> per_cycle_off;  ///< index 0 is the state before the first cycle
    std::vector<StepRecord> steps;
    std::size_t cycles_used = 0;
    bool converged = false;
    double initial_off = 0.0;
    double norm = 0.0;  ///< ||A||_F of the input

    std::string strategy_id;
    std::vector<std::size_t> block_sizes;
    std::uint64_t seed = 0;
    std::size_t shift_count = 0;
    std::size_t ubc_fallbacks = 0;

    // normal solver
    std::vector<double> commutation_residual;
    std::vector<double> crs_diagnostic;
    // J-Hermitian solver
    std::vector<double> j_defect;
    std::vector<double> frobenius;
    double trace_bound = 0.0;
    std::vector<std::string> warnings;
};

struct SolveResult {
    std::vector<cplx> lambda;
    cmat transform;
    ConvergenceTrace trace;
    cmat final_matrix;
};

namespace detail {

/// Squared Frobenius sums of every block pair plus off^2 of every diagonal block.
class BlockSums {
public:
    BlockSums() = default;
    BlockSums(const cmat& a, const BlockPartition& p) : p_(&p), m_(p.m()), s_(m_ * m_, 0.0), d_(m_, 0.0) {
        for (std::size_t b = 0; b < m_; ++b) refresh_column(a, b);
    }

    void refresh_pair(const cmat& a, std::size_t i, std::size_t j) {
        refresh_column(a, i);
        refresh_column(a, j);
    }

    double off2() const {
        double t = 0.0;
        for (std::size_t b = 0; b < m_; ++b) {
            for (std::size_t c = 0; c < m_; ++c)
                if (b != c) t += s_[b * m_ + c];
            t += d_[b];
        }
        return t;
    }

    double frob2() const { return std::accumulate(s_.begin(), s_.end(), 0.0); }

private:
    /// Recomputes blocks (k, b) for all k; (b, k) follows by Hermitian symmetry.
    void refresh_column(const cmat& a, std::size_t b) {
        const BlockPartition& p = *p_;
        const std::size_t ob = p.offset(b), nb = p.size(b);
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t ok = p.offset(k), nk = p.size(k);
            double t = 0.0, off = 0.0;
            for (std::size_t c = 0; c < nb; ++c)
                for (std::size_t r = 0; r < nk; ++r) {
                    const double x = std::norm(a(ok + r, ob + c));
                    t += x;
                    if (k == b && r != c) off += x;
                }
            s_[k * m_ + b] = t;
            s_[b * m_ + k] = t;
            if (k == b) d_[b] = off;
        }
    }

    const BlockPartition* p_ = nullptr;
    std::size_t m_ = 0;
    std::vector<double> s_;
    std::vector<double> d_;
};

inline cmat principal(const cmat& a, std::span<const std::size_t> idx) {
    cmat s(idx.size(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c)
        for (std::size_t r = 0; r < idx.size(); ++r) s(r, c) = a(idx[r], idx[c]);
    return s;
}

inline void set_principal_diagonal(cmat& a, std::span<const std::size_t> idx, const std::vector<double>& lambda) {
    for (std::size_t c = 0; c < idx.size(); ++c)
        for (std::size_t r = 0; r < idx.size(); ++r) a(idx[r], idx[c]) = r == c ? cplx(lambda[r]) : cplx{};
}

inline std::uint64_t step_seed(std::uint64_t seed, std::uint64_t step) {
    return splitmix64(seed ^ splitmix64(step + 0x5bd1e995ULL));
}

inline CoreResult run_core(const cmat& sub, const SolverConfig& cfg, std::uint64_t step, std::optional<std::size_t> nu) {
    const std::size_t q = sub.rows();
    CoreResult res;
    if (nu) {
        res = elementwise_j_jacobi(sub, *nu, random_generalized_serial(q, step_seed(cfg.seed, step), q), cfg.core_options);
    } else if (cfg.core == CoreKind::classical) {
        res = elementwise_jacobi_classical(sub, cfg.core_options);
    } else {
        res = q == 1 ? elementwise_jacobi(sub, PivotOrdering{{}, 1, 0, {}}, cfg.core_options)
                     : elementwise_jacobi(sub, random_generalized_serial(q, step_seed(cfg.seed, step), q),
                                          cfg.core_options);
    }
    if (!res.converged)
        throw CoreNonConvergence("core algorithm did not converge on a pivot submatrix of order " + std::to_string(q),
                                 sub);
    return res;
}

/// Stable sort of columns [lo, hi) of u and of lambda by descending lambda.
inline void sort_descending(cmat& u, std::vector<double>& lambda, std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> order(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lambda[x] > lambda[y]; });
    const cmat old = u;
    const std::vector<double> old_l = lambda;
    for (std::size_t k = 0; k < order.size(); ++k) {
        lambda[lo + k] = old_l[order[k]];
        auto dst = u.col(lo + k);
        auto src = old.col(order[k]);
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

struct StepTransform {
    ElementaryBlockTransform t;
    std::vector<double> lambda;
    UbcSource ubc = UbcSource::none;
};

/// Diagonalizes the pivot submatrix and returns the (UBC-enforced unless hyperbolic) transform;
/// columns are ordered by descending eigenvalue within each of the two blocks.
inline StepTransform step_transform(const cmat& sub, const BlockPartition& p, std::size_t i, std::size_t j,
                                    const SolverConfig& cfg, std::uint64_t step, bool hyperbolic) {
    const std::size_t ni = p.size(i), nj = p.size(j);
    CoreResult core = run_core(sub, cfg, step, hyperbolic ? std::optional<std::size_t>(ni) : std::nullopt);
    StepTransform out;
    out.lambda = std::move(core.lambda);
    if (hyperbolic) {
        out.t = {i, j, std::move(core.transform), TransformKind::j_unitary};
    } else {
        auto ubc = enforce_ubc_detailed({i, j, std::move(core.transform), TransformKind::unitary}, p, cfg.rho,
                                        cfg.use_attr_R);
        const auto perm = permutation_of(ubc.applied, ni + nj);
        std::vector<double> l(perm.size());
        for (std::size_t k = 0; k < perm.size(); ++k) l[k] = out.lambda[perm[k]];
        out.lambda = std::move(l);
        out.t = std::move(ubc.transform);
        out.ubc = ubc.source;
    }
    sort_descending(out.t.pivot, out.lambda, 0, ni);
    sort_descending(out.t.pivot, out.lambda, ni, ni + nj);
    return out;
}

inline const PivotOrdering& resolve_ordering(const SolverConfig& cfg, const BlockPartition& p, PivotOrdering& storage) {
    if (cfg.ordering.pairs.empty()) {
        storage = p.m() >= 2 ? column_cyclic(p.m()) : PivotOrdering{{}, p.m(), 0, {}};
        return storage;
    }
    if (cfg.ordering.m != p.m() || !is_valid_cyclic(cfg.ordering))
        throw ConfigError("pivot ordering does not match the partition's block count");
    return cfg.ordering;
}

/// Diagonalizes every diagonal block of `a` (and applies the same unitaries to `others` and to the columns of v).
inline void preprocess_blocks(cmat& a, std::vector<cmat*>& others, cmat& v, const BlockPartition& p,
                              const SolverConfig& cfg) {
    for (std::size_t b = 0; b < p.m(); ++b) {
        if (p.size(b) < 2) continue;
        std::vector<std::size_t> idx(p.size(b));
        std::iota(idx.begin(), idx.end(), p.offset(b));
        const cmat sub = principal(a, idx);
        if (off_norm(sub) == 0.0) continue;
        SolverConfig pc = cfg;
        pc.seed = splitmix64(cfg.seed ^ 0x7072657072ULL);
        CoreResult core = run_core(sub, pc, b, std::nullopt);
        apply_similarity_on(a, idx, core.transform, false);
        set_principal_diagonal(a, idx, core.lambda);
        for (cmat* o : others) apply_similarity_on(*o, idx, core.transform, true);
        apply_right_on(v, idx, core.transform);
    }
}

inline void fill_trace_meta(ConvergenceTrace& tr, const SolverConfig& cfg, const BlockPartition& p,
                            const PivotOrdering& o) {
    tr.strategy_id = cfg.strategy_id.empty() ? to_string(o) : cfg.strategy_id;
    tr.block_sizes = p.sizes();
    tr.seed = cfg.seed;
    tr.shift_count = o.shift_count;
}

} // namespace detail

/// A0 = U0^* A U0 with U0 block diagonal and every diagonal block of A0 diagonal.
inline std::pair<PartitionedHermitian, cmat> preprocess_diagonal_blocks(const PartitionedHermitian& a,
                                                                        const SolverConfig& cfg = {}) {
    cmat m = a.matrix();
    cmat v = cmat::identity(a.n());
    std::vector<cmat*> none;
    detail::preprocess_blocks(m, none, v, a.partition(), cfg);
    return {PartitionedHermitian(m, a.partition()), std::move(v)};
}

struct StepOutcome {
    ElementaryBlockTransform transform;
    std::vector<double> lambda;
    double annihilated = 0.0;
    UbcSource ubc = UbcSource::none;
};

/// One block Jacobi step on pivot pair (i, j) of Hermitian `a`, in place.
inline StepOutcome block_step(cmat& a, const BlockPartition& p, std::size_t i, std::size_t j,
                              const SolverConfig& cfg = {}, std::uint64_t step_index = 0) {
    if (!(i < j) || j >= p.m()) throw DimensionMismatch("invalid pivot pair");
    const auto idx = p.pivot_indices(i, j);
    const cmat sub = detail::principal(a, idx);
    StepOutcome out;
    out.annihilated = std::pow(off_norm(sub), 2);
    auto st = detail::step_transform(sub, p, i, j, cfg, step_index, false);
    apply_similarity_on(a, idx, st.t.pivot, false);
    detail::set_principal_diagonal(a, idx, st.lambda);
    out.transform = std::move(st.t);
    out.lambda = std::move(st.lambda);
    out.ubc = st.ubc;
    return out;
}

enum class PerturbationMode { full, off_diagonal_blocks, diagonal_blocks };

/// E^(k) = amplitude * decay^(k+1) * ||A||_F * G_k / ||G_k||_F with G_k seeded Hermitian Gaussian.
struct Perturbation {
    double amplitude = 1e-3;
    double decay = 0.5;
    std::uint64_t seed = 1;
    PerturbationMode mode = PerturbationMode::full;
};

namespace detail {

inline double add_perturbation(cmat& a, const BlockPartition& p, const Perturbation& e, std::uint64_t step,
                               double norm_a) {
    const double scale = e.amplitude * std::pow(e.decay, static_cast<double>(step + 1)) * norm_a;
    if (scale == 0.0) return 0.0;
    engine g = make_engine(e.seed, step);
    const std::size_t n = a.rows();
    cmat gm(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r <= c; ++r) {
            const bool same = p.block_of(r) == p.block_of(c);
            const bool keep = e.mode == PerturbationMode::full || (e.mode == PerturbationMode::diagonal_blocks) == same;
            if (!keep) continue;
            cplx z = complex_gaussian(g);
            if (r == c) z = z.real();
            gm(r, c) = z;
            gm(c, r) = std::conj(z);
        }
    const double nf = frobenius_norm(gm);
    if (nf == 0.0) return 0.0;
    gm *= cplx(scale / nf);
    a += gm;
    return scale;
}

/// max |a_rs| / sqrt(|a_rr a_ss|) over r != s, with the denominator floored at DBL_MIN.
inline double scaled_off_max(const cmat& a) {
    const std::size_t n = a.rows();
    double worst = 0.0;
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < c; ++r) {
            const double den = std::max(std::sqrt(std::abs(a(r, r).real() * a(c, c).real())),
                                        std::numeric_limits<double>::min());
            worst = std::max(worst, std::abs(a(r, c)) / den);
        }
    return worst;
}

struct HermitianRunOptions {
    std::optional<std::size_t> nu;  ///< J-Hermitian: signature split
    std::optional<Perturbation> perturbation;
};

inline SolveResult run_hermitian(const PartitionedHermitian& input, const SolverConfig& cfg,
                                 const HermitianRunOptions& ro, const StepObserver& observer) {
    validate(cfg);
    const BlockPartition& p = input.partition();
    PivotOrdering storage;
    const PivotOrdering& o = resolve_ordering(cfg, p, storage);
    const std::size_t n = input.n();
    SolveResult res;
    ConvergenceTrace& tr = res.trace;
    fill_trace_meta(tr, cfg, p, o);

    cmat a = input.matrix();
    cmat v = cmat::identity(n);
    const double norm_a = frobenius_norm(a);
    tr.norm = norm_a;
    tr.initial_off = off_norm(a);

    std::size_t p_split = 0;
    if (ro.nu) {
        const std::size_t nu = *ro.nu;
        if (nu == 0 || nu >= n) throw ConfigError("nu must satisfy 1 <= nu < n");
        const auto offs = p.offsets();
        auto it = std::find(offs.begin(), offs.end(), nu);
        if (it == offs.end()) throw ConfigError("partition is not a subpartition of (nu, n - nu)");
        p_split = static_cast<std::size_t>(it - offs.begin());
        tr.trace_bound = trace_real(a);
        for (std::size_t k = 0; k < n; ++k)
            if (!(a(k, k).real() > 0.0)) throw DefinitenessViolation("input has a nonpositive diagonal entry");
    }

    if (cfg.preprocess || p.m() == 1) {
        std::vector<cmat*> none;
        preprocess_blocks(a, none, v, p, cfg);
    }
    BlockSums sums(a, p);
    const auto j_defect = [&] { return j_unitarity_defect(v, *ro.nu); };
    const auto record_cycle = [&](double off) {
        tr.per_cycle_off.push_back(off);
        if (ro.nu) {
            tr.frobenius.push_back(std::sqrt(sums.frob2()));
            tr.j_defect.push_back(j_defect());
        }
    };
    const auto done = [&](double off) {
        const double ref = ro.nu ? std::sqrt(sums.frob2()) : norm_a;
        if (!(off <= cfg.tol * ref)) return false;
        return !cfg.relative_stop || scaled_off_max(a) <= cfg.tol;
    };

    double off = std::sqrt(sums.off2());
    record_cycle(off);
    tr.converged = done(off);
    std::uint64_t k = 0;
    for (std::size_t cycle = 1; cycle <= cfg.max_cycles && !tr.converged; ++cycle) {
        for (const auto& pr : o.pairs) {
            const auto idx = p.pivot_indices(pr.r, pr.s);
            const cmat sub = principal(a, idx);
            StepRecord rec;
            rec.cycle = cycle;
            rec.step = k;
            rec.pair = pr;
            rec.off2_before = sums.off2();
            rec.annihilated = std::pow(off_norm(sub), 2);
            rec.hyperbolic = ro.nu && pr.r < p_split && pr.s >= p_split;
            auto st = step_transform(sub, p, pr.r, pr.s, cfg, k, rec.hyperbolic);
            if (cfg.use_attr_R && !rec.hyperbolic && st.ubc != UbcSource::attribute_r) ++tr.ubc_fallbacks;
            rec.ubc = st.ubc;
            apply_similarity_on(a, idx, st.t.pivot, false);
            set_principal_diagonal(a, idx, st.lambda);
            apply_right_on(v, idx, st.t.pivot);
            if (ro.perturbation) {
                rec.perturbation = add_perturbation(a, p, *ro.perturbation, k, norm_a);
                if (rec.perturbation > 0.0) sums = BlockSums(a, p);
            }
            if (rec.perturbation == 0.0) sums.refresh_pair(a, pr.r, pr.s);
            rec.off2_after = sums.off2();
            rec.frob_after = std::sqrt(sums.frob2());
            tr.per_step_off.push_back(std::sqrt(rec.off2_after));
            if (observer) observer(rec, a);
            tr.steps.push_back(rec);
            ++k;
        }
        sums = BlockSums(a, p);
        off = std::sqrt(sums.off2());
        record_cycle(off);
        tr.cycles_used = cycle;
        tr.converged = done(off);
    }

    res.lambda.resize(n);
    for (std::size_t r = 0; r < n; ++r) res.lambda[r] = a(r, r).real();
    res.transform = std::move(v);
    res.final_matrix = std::move(a);
    return res;
}

} // namespace detail

inline SolveResult solve_hermitian(const PartitionedHermitian& a, const SolverConfig& cfg = {},
                                   const StepObserver& observer = {}) {
    return detail::run_hermitian(a, cfg, {}, observer);
}

/// Block J-Jacobi for the pencil (A, J), J = diag(I_nu, -I_{n-nu}), A positive definite.
/// Pencil eigenvalues are J * lambda.
inline SolveResult solve_j_hermitian(const PartitionedHermitian& a, std::size_t nu, const SolverConfig& cfg = {},
                                     const StepObserver& observer = {}) {
    return detail::run_hermitian(a, cfg, {nu, std::nullopt}, observer);
}

inline std::vector<double> pencil_eigenvalues(const SolveResult& r, std::size_t nu) {
    std::vector<double> out(r.lambda.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < nu ? r.lambda[k].real() : -r.lambda[k].real();
    return out;
}

/// Hermitian block process with A^(k+1) = T^* A^(k) T + E^(k).
inline SolveResult solve_perturbed(const PartitionedHermitian& a, const SolverConfig& cfg, const Perturbation& e,
                                   const StepObserver& observer = {}) {
    if (!(e.decay >= 0.0 && e.decay < 1.0)) throw ConfigError("perturbation decay must lie in [0, 1)");
    detail::HermitianRunOptions ro;
    if (e.decay > 0.0 && e.amplitude != 0.0) ro.perturbation = e;
    return detail::run_hermitian(a, cfg, ro, observer);
}

enum class NormalDriver { hermitian_part, skew_part };

inline double normality_defect(const cmat& a) { return frobenius_norm(a.adjoint() * a - a * a.adjoint()); }

/// B = (A + A^*)/2 and C = i(A^* - A)/2, so A = B + iC.
inline std::pair<cmat, cmat> normal_split(const cmat& a) {
    cmat b = hermitian_part(a);
    cmat c = a.adjoint() - a;
    c *= cplx(0.0, 0.5);
    return {b, hermitian_part(c)};
}

/// Smallest gap between sorted eigenvalues relative to their spread (infinity when n < 2 or spread is 0).
inline double relative_min_gap(const cmat& h) {
    const std::size_t n = h.rows();
    if (n < 2) return INFINITY;
    auto ev = elementwise_jacobi(h, column_cyclic(n)).lambda;
    std::sort(ev.begin(), ev.end());
    const double spread = ev.back() - ev.front();
    if (spread == 0.0) return 0.0;
    double g = INFINITY;
    for (std::size_t k = 1; k < n; ++k) g = std::min(g, ev[k] - ev[k - 1]);
    return g / spread;
}

struct NormalOptions {
    NormalDriver driver = NormalDriver::hermitian_part;
    bool auto_fallback = true;
    double normality_tol = 1e-12;
    double cluster_tol = 1e-8;
};

/// Block Jacobi for a normal matrix driven by one Hermitian part; the other part is carried along.
inline SolveResult solve_normal(const cmat& a_in, const BlockPartition& p, const SolverConfig& cfg = {},
                                const NormalOptions& nopt = {}, const StepObserver& observer = {}) {
    validate(cfg);
    if (!a_in.is_square() || a_in.rows() != p.n()) throw DimensionMismatch("solve_normal: dimension mismatch");
    const double norm_a = frobenius_norm(a_in);
    if (normality_defect(a_in) > nopt.normality_tol * norm_a * norm_a)
        throw NotNormal("||A^*A - AA^*||_F exceeds tolerance");
    PivotOrdering storage;
    const PivotOrdering& o = detail::resolve_ordering(cfg, p, storage);
    const std::size_t n = a_in.rows();
    SolveResult res;
    ConvergenceTrace& tr = res.trace;
    detail::fill_trace_meta(tr, cfg, p, o);
    tr.norm = norm_a;

    auto [b, c] = normal_split(a_in);
    NormalDriver driver = nopt.driver;
    const double gb = relative_min_gap(b), gc = relative_min_gap(c);
    if (driver == NormalDriver::hermitian_part && gb < nopt.cluster_tol) {
        if (nopt.auto_fallback && gc >= nopt.cluster_tol) {
            driver = NormalDriver::skew_part;
            tr.warnings.push_back("hermitian part has clustered eigenvalues; driving with the skew part");
        } else {
            tr.warnings.push_back("driver part has clustered eigenvalues; convergence is not guaranteed");
        }
    } else if (driver == NormalDriver::skew_part && gc < nopt.cluster_tol) {
        tr.warnings.push_back("driver part has clustered eigenvalues; convergence is not guaranteed");
    }
    cmat& d = driver == NormalDriver::hermitian_part ? b : c;
    cmat& other = driver == NormalDriver::hermitian_part ? c : b;

    cmat v = cmat::identity(n);
    tr.initial_off = std::sqrt(std::pow(off_norm(b), 2) + std::pow(off_norm(c), 2));
    if (cfg.preprocess || p.m() == 1) {
        std::vector<cmat*> others{&other};
        detail::preprocess_blocks(d, others, v, p, cfg);
    }
    const auto off_total = [&] { return std::sqrt(std::pow(off_norm(b), 2) + std::pow(off_norm(c), 2)); };
    const auto record_cycle = [&](double off) {
        tr.per_cycle_off.push_back(off);
        const double na2 = std::max(norm_a * norm_a, 1e-300);
        tr.commutation_residual.push_back(frobenius_norm(b * c - c * b) / na2);
        double crs = 0.0;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t r = 0; r < n; ++r)
                if (r != s) crs = std::max(crs, std::abs(c(r, s)) * std::abs(b(r, r).real() - b(s, s).real()));
        tr.crs_diagnostic.push_back(crs);
    };

    double off = off_total();
    record_cycle(off);
    tr.converged = off <= cfg.tol * norm_a;
    std::uint64_t k = 0;
    for (std::size_t cycle = 1; cycle <= cfg.max_cycles && !tr.converged; ++cycle) {
        for (const auto& pr : o.pairs) {
            const auto idx = p.pivot_indices(pr.r, pr.s);
            const cmat sub = detail::principal(d, idx);
            StepRecord rec;
            rec.cycle = cycle;
            rec.step = k;
            rec.pair = pr;
            rec.annihilated = std::pow(off_norm(sub), 2);
            auto st = detail::step_transform(sub, p, pr.r, pr.s, cfg, k, false);
            rec.ubc = st.ubc;
            if (cfg.use_attr_R && st.ubc != UbcSource::attribute_r) ++tr.ubc_fallbacks;
            apply_similarity_on(d, idx, st.t.pivot, false);
            detail::set_principal_diagonal(d, idx, st.lambda);
            apply_similarity_on(other, idx, st.t.pivot, true);
            apply_right_on(v, idx, st.t.pivot);
            tr.per_step_off.push_back(off_total());
            if (observer) observer(rec, d);
            tr.steps.push_back(rec);
            ++k;
        }
        off = off_total();
        record_cycle(off);
        tr.cycles_used = cycle;
        tr.converged = off <= cfg.tol * norm_a;
    }
    res.lambda.resize(n);
    for (std::size_t r = 0; r < n; ++r) res.lambda[r] = {b(r, r).real(), c(r, r).real()};
    res.transform = std::move(v);
    cmat fin = c;
    fin *= cplx(0.0, 1.0);
    fin += b;
    res.final_matrix = std::move(fin);
    return res;
}

} // namespace bjac
