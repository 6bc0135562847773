#include "clk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "clk/errors.hpp"

namespace clk {

namespace {

// Generator positions: dzbar_k -> k, dzeta_k -> n + k, dzetabar_k -> 2n + k
// (k zero-based). Canonical monomial order is ascending positions, which is
// exactly dzbar_J ^ dzeta_1..n ^ dzetabar_K.
int sequence_sign(const std::vector<int>& pos) {
    int inv = 0;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j)
            if (pos[i] > pos[j]) ++inv;
    return (inv & 1) ? -1 : 1;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::vector<int> bits_of(std::uint32_t mask) {
    std::vector<int> out;
    for (std::uint32_t m = mask; m; m &= m - 1) out.push_back(__builtin_ctz(m));
    return out;
}

struct Term {
    std::uint32_t Jmask = 0, Kmask = 0;
    double coef = 0.0;                      // sign x multinomial x (-1)^{|J|}
    int j0 = -1, j1 = -1;                   // g0 / g1 component factors
    int alpha = -1, beta = -1;              // denominator N0^{alpha+1} N1^{beta+1}
    std::array<std::uint8_t, 8> hrow{}, hcol{};
    int hcount = 0;
};

}  // namespace

struct KernelEvaluator::Tables {
    int n = 0;
    std::vector<MultiIndexSet> row_sets;              // by q
    std::vector<MultiIndexSet> col_single, col_mixed; // K enumerations by q
    std::vector<std::vector<Term>> omega0, omega1, omega01;  // terms by q
    bool omega1_needs_hessian = false;
    bool omega01_needs_hessian = false;
    Complex constant;  // (2 pi i)^{-n}

    explicit Tables(int n_) : n(n_) {
        const std::uint32_t FULL = (1u << n) - 1;
        row_sets.reserve(static_cast<std::size_t>(n) + 1);
        for (int q = 0; q <= n; ++q) row_sets.emplace_back(n, q);
        col_single.reserve(static_cast<std::size_t>(n));
        col_mixed.reserve(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) col_single.emplace_back(n, n - 1 - q);
        for (int q = 0; q + 2 <= n; ++q) col_mixed.emplace_back(n, n - 2 - q);

        omega0.resize(static_cast<std::size_t>(n));
        omega1.resize(static_cast<std::size_t>(n));
        omega01.resize(static_cast<std::size_t>(std::max(0, n - 1)));

        // ---- Omega0_{0,q}: eta0 ^ beta0^{n-1} with beta0 = sum_k (dzetabar_k - dzbar_k) ^ dzeta_k
        for (int j = 0; j < n; ++j) {
            std::uint32_t rest = FULL & ~(1u << j);
            for (std::uint32_t J = 0;; J = (J - rest) & rest) {
                std::uint32_t K = rest & ~J;
                int q = __builtin_popcount(J);
                std::vector<int> pos = {n + j};
                for (int k : bits_of(rest)) {
                    pos.push_back((J >> k) & 1u ? k : 2 * n + k);
                    pos.push_back(n + k);
                }
                Term t;
                t.Jmask = J;
                t.Kmask = K;
                t.j0 = j;
                t.alpha = n - 1;
                t.coef = sequence_sign(pos) * factorial(n - 1) * ((q & 1) ? -1.0 : 1.0);
                omega0[static_cast<std::size_t>(q)].push_back(t);
                if (J == rest) break;
            }
        }

        // ---- Omega1_{0,0}: eta1 ^ beta1^{n-1}, beta1 = sum_{k,l} H_{kl} dzetabar_k ^ dzeta_l.
        // (Omega1_{0,q} = 0 for q >= 1: the weight is holomorphic in z.)
        for (int j = 0; j < n; ++j) {
            std::uint32_t rest = FULL & ~(1u << j);
            std::vector<int> cols = bits_of(rest);
            for (std::uint32_t K = 0; K <= FULL; ++K) {
                if (__builtin_popcount(K) != n - 1) continue;
                std::vector<int> rows = bits_of(K);
                std::sort(rows.begin(), rows.end());
                do {
                    std::vector<int> pos = {n + j};
                    Term t;
                    t.Kmask = K;
                    t.j1 = j;
                    t.beta = n - 1;
                    for (std::size_t i = 0; i < cols.size(); ++i) {
                        pos.push_back(2 * n + rows[i]);
                        pos.push_back(n + cols[i]);
                        t.hrow[static_cast<std::size_t>(t.hcount)] = static_cast<std::uint8_t>(rows[i]);
                        t.hcol[static_cast<std::size_t>(t.hcount)] = static_cast<std::uint8_t>(cols[i]);
                        ++t.hcount;
                    }
                    t.coef = sequence_sign(pos) * factorial(n - 1);
                    omega1[0].push_back(t);
                } while (std::next_permutation(rows.begin(), rows.end()));
                if (n >= 2) omega1_needs_hessian = true;
            }
        }

        // ---- Omega01_{0,q}: sum over alpha+beta = n-2 of
        //      eta0 ^ beta0^alpha ^ eta1 ^ beta1^beta / (N0^{alpha+1} N1^{beta+1})
        for (int alpha = 0; alpha + 2 <= n; ++alpha) {
            int beta = n - 2 - alpha;
            for (int j0 = 0; j0 < n; ++j0) {
                for (int j1 = 0; j1 < n; ++j1) {
                    if (j1 == j0) continue;
                    std::uint32_t rest = FULL & ~(1u << j0) & ~(1u << j1);
                    for (std::uint32_t P = 0;; P = (P - rest) & rest) {
                        if (__builtin_popcount(P) == alpha) {
                            std::uint32_t Q = rest & ~P;
                            for (std::uint32_t J = 0;; J = (J - P) & P) {
                                std::uint32_t K1 = P & ~J;
                                int q = __builtin_popcount(J);
                                std::uint32_t avail = FULL & ~K1;
                                for (std::uint32_t T = 0;; T = (T - avail) & avail) {
                                    if (__builtin_popcount(T) == beta) {
                                        std::vector<int> qcols = bits_of(Q);
                                        std::vector<int> trows = bits_of(T);
                                        std::sort(trows.begin(), trows.end());
                                        do {
                                            std::vector<int> pos = {n + j0};
                                            for (int k : bits_of(P)) {
                                                pos.push_back((J >> k) & 1u ? k : 2 * n + k);
                                                pos.push_back(n + k);
                                            }
                                            pos.push_back(n + j1);
                                            Term t;
                                            t.Jmask = J;
                                            t.Kmask = K1 | T;
                                            t.j0 = j0;
                                            t.j1 = j1;
                                            t.alpha = alpha;
                                            t.beta = beta;
                                            for (std::size_t i = 0; i < qcols.size(); ++i) {
                                                pos.push_back(2 * n + trows[i]);
                                                pos.push_back(n + qcols[i]);
                                                t.hrow[static_cast<std::size_t>(t.hcount)] =
                                                    static_cast<std::uint8_t>(trows[i]);
                                                t.hcol[static_cast<std::size_t>(t.hcount)] =
                                                    static_cast<std::uint8_t>(qcols[i]);
                                                ++t.hcount;
                                            }
                                            if (t.hcount > 0) omega01_needs_hessian = true;
                                            t.coef = sequence_sign(pos) * factorial(alpha) * factorial(beta) *
                                                     ((q & 1) ? -1.0 : 1.0);
                                            omega01[static_cast<std::size_t>(q)].push_back(t);
                                        } while (std::next_permutation(trows.begin(), trows.end()));
                                    }
                                    if (T == avail) break;
                                }
                                if (J == P) break;
                            }
                        }
                        if (P == rest) break;
                    }
                }
            }
        }

        Complex two_pi_i(0.0, 2.0 * M_PI);
        constant = 1.0;
        for (int i = 0; i < n; ++i) constant /= two_pi_i;
    }
};

namespace {

std::shared_ptr<const KernelEvaluator::Tables> tables_for(int n) {
    static std::map<int, std::shared_ptr<const KernelEvaluator::Tables>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_shared<KernelEvaluator::Tables>(n)).first;
    return it->second;
}

}  // namespace

KernelEvaluator::KernelEvaluator(int n, DefiningFunctionPtr r, SingularSetGuard guard)
    : n_(n), r_(std::move(r)), guard_(guard) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("KernelEvaluator: dimension out of range");
    if (r_ && r_->dim() != n) throw std::invalid_argument("KernelEvaluator: defining function dimension mismatch");
    tables_ = tables_for(n);
}

int KernelEvaluator::zetabar_degree(KernelKind kind, int n, int q) {
    return kind == KernelKind::Omega01 ? n - 2 - q : n - 1 - q;
}

const MultiIndexSet& KernelEvaluator::row_set(int q) const {
    if (q < 0 || q > n_) throw DegreeError("kernel row degree out of range");
    return tables_->row_sets[static_cast<std::size_t>(q)];
}

const MultiIndexSet& KernelEvaluator::col_set(KernelKind kind, int q) const {
    if (kind == KernelKind::Omega01) {
        if (n_ < 2 || q < 0 || q > n_ - 2) throw DegreeError("Omega01: q_out must lie in [0, n-2]");
        return tables_->col_mixed[static_cast<std::size_t>(q)];
    }
    if (q < 0 || q > n_ - 1) throw DegreeError("kernel degree q_out must lie in [0, n-1]");
    return tables_->col_single[static_cast<std::size_t>(q)];
}

void KernelEvaluator::eval(KernelKind kind, int q, const CPoint& z, const CPoint& zeta, CVector& out) const {
    const int n = n_;
    if (kind == KernelKind::Omega01) {
        if (n < 2) throw DegreeError("Omega01 requires n >= 2");
        if (q < 0 || q > n - 2) throw DegreeError("Omega01: q_out must lie in [0, n-2]");
    } else {
        if (q < 0 || q > n - 1) throw DegreeError("kernel degree q_out must lie in [0, n-1]");
    }

    std::array<Complex, kMaxDim> g0, g1, w;
    std::array<Complex, kMaxDim * kMaxDim> H;
    Complex N0 = 0.0, N1 = 0.0;
    for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(j)] = zeta[j] - z[j];
        g0[static_cast<std::size_t>(j)] = std::conj(zeta[j]) - std::conj(z[j]);
        N0 += g0[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
    }

    const bool needs_g1 = kind != KernelKind::Omega0;
    if (needs_g1) {
        if (!r_) throw std::logic_error("kernel evaluation with weight g1 requires a defining function");
        CVector grad = r_->gradient(zeta);
        for (int j = 0; j < n; ++j) {
            g1[static_cast<std::size_t>(j)] = grad[static_cast<std::size_t>(j)];
            N1 += g1[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)];
        }
    }

    const bool needs_g0 = kind != KernelKind::Omega1;
    if (needs_g0 && std::abs(N0) < guard_.min_pairing_g0)
        throw SingularKernelError("kernel singularity: |zeta - z|^2 below guard threshold");
    if (needs_g1 && std::abs(N1) < guard_.min_pairing_g1)
        throw SingularKernelError("kernel singularity: |r_zeta . (zeta - z)| below guard threshold");

    const bool needs_h = (kind == KernelKind::Omega1 && tables_->omega1_needs_hessian) ||
                         (kind == KernelKind::Omega01 && tables_->omega01_needs_hessian);
    if (needs_h) {
        CMatrix hm = r_->mixed_hessian(zeta);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) H[static_cast<std::size_t>(k * n + j)] = hm(k, j);
    }

    // denominator powers
    std::array<Complex, kMaxDim + 1> p0, p1;
    p0[0] = 1.0;
    p1[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        p0[static_cast<std::size_t>(i)] = p0[static_cast<std::size_t>(i - 1)] * N0;
        p1[static_cast<std::size_t>(i)] = p1[static_cast<std::size_t>(i - 1)] * N1;
    }

    const std::vector<Term>* terms = nullptr;
    switch (kind) {
        case KernelKind::Omega0: terms = &tables_->omega0[static_cast<std::size_t>(q)]; break;
        case KernelKind::Omega1:
            terms = q == 0 ? &tables_->omega1[0] : &tables_->omega1[static_cast<std::size_t>(q)];
            break;
        case KernelKind::Omega01: terms = &tables_->omega01[static_cast<std::size_t>(q)]; break;
    }

    const MultiIndexSet& rows = row_set(q);
    const MultiIndexSet& cols = col_set(kind, q);
    out.assign(static_cast<std::size_t>(rows.count()) * cols.count(), Complex(0.0));

    for (const Term& t : *terms) {
        Complex v = t.coef;
        if (t.j0 >= 0) v *= g0[static_cast<std::size_t>(t.j0)];
        if (t.j1 >= 0) v *= g1[static_cast<std::size_t>(t.j1)];
        for (int i = 0; i < t.hcount; ++i)
            v *= H[static_cast<std::size_t>(t.hrow[static_cast<std::size_t>(i)] * n +
                                            t.hcol[static_cast<std::size_t>(i)])];
        if (t.alpha >= 0) v /= p0[static_cast<std::size_t>(t.alpha + 1)];
        if (t.beta >= 0) v /= p1[static_cast<std::size_t>(t.beta + 1)];
        out[static_cast<std::size_t>(rows.ordinal(t.Jmask)) * cols.count() + cols.ordinal(t.Kmask)] +=
            tables_->constant * v;
    }
}

namespace {

KernelCoefficients make_coeffs(const KernelEvaluator& ev, KernelKind kind, int q, const CPoint& z,
                               const CPoint& zeta) {
    KernelCoefficients kc;
    kc.kind = kind;
    kc.n = ev.dim();
    kc.q = q;
    kc.rows = ev.row_set(q);
    kc.cols = ev.col_set(kind, q);
    ev.eval(kind, q, z, zeta, kc.values);
    return kc;
}

}  // namespace

KernelCoefficients omega0_coeffs(const CPoint& z, const CPoint& zeta, int q_out, SingularSetGuard guard) {
    KernelEvaluator ev(z.dim(), nullptr, guard);
    return make_coeffs(ev, KernelKind::Omega0, q_out, z, zeta);
}

KernelCoefficients omega1_coeffs(const DefiningFunctionPtr& r, const CPoint& z, const CPoint& zeta,
                                 int q_out, SingularSetGuard guard) {
    KernelEvaluator ev(z.dim(), r, guard);
    return make_coeffs(ev, KernelKind::Omega1, q_out, z, zeta);
}

KernelCoefficients omega01_coeffs(const DefiningFunctionPtr& r, const CPoint& z, const CPoint& zeta,
                                  int q_out, SingularSetGuard guard) {
    KernelEvaluator ev(z.dim(), r, guard);
    return make_coeffs(ev, KernelKind::Omega01, q_out, z, zeta);
}

namespace {

/// Coefficients of dbar in zeta (var = true) or z (var = false) of a kernel piece,
/// by central differences; output indexed by (J[+m], K[+m]) with wedge signs.
/// rows_out/cols_out describe the derivative's index sets.
void dbar_of_kernel(const KernelEvaluator& ev, KernelKind kind, int q, const CPoint& z, const CPoint& zeta,
                    bool wrt_zeta, double h, CVector& out, const MultiIndexSet& rows_out,
                    const MultiIndexSet& cols_out) {
    const int n = ev.dim();
    const MultiIndexSet& rows = ev.row_set(q);
    const MultiIndexSet& cols = ev.col_set(kind, q);
    out.assign(static_cast<std::size_t>(rows_out.count()) * cols_out.count(), Complex(0.0));
    CVector cp, cm;
    for (int m = 0; m < n; ++m) {
        Complex dbar_m_scale[2] = {Complex(0.5, 0.0), Complex(0.0, 0.5)};  // d/dx, i d/dy
        CVector deriv(static_cast<std::size_t>(rows.count()) * cols.count(), Complex(0.0));
        for (int part = 0; part < 2; ++part) {
            CPoint zp = z, zm = z, tp = zeta, tm = zeta;
            int coord = 2 * m + part;
            if (wrt_zeta) {
                tp.set_real_coord(coord, tp.real_coord(coord) + h);
                tm.set_real_coord(coord, tm.real_coord(coord) - h);
            } else {
                zp.set_real_coord(coord, zp.real_coord(coord) + h);
                zm.set_real_coord(coord, zm.real_coord(coord) - h);
            }
            ev.eval(kind, q, zp, tp, cp);
            ev.eval(kind, q, zm, tm, cm);
            for (std::size_t i = 0; i < deriv.size(); ++i)
                deriv[i] += dbar_m_scale[part] * (cp[i] - cm[i]) / (2.0 * h);
        }
        for (int rj = 0; rj < rows.count(); ++rj) {
            std::uint32_t J = rows.list()[static_cast<std::size_t>(rj)].mask();
            for (int ck = 0; ck < cols.count(); ++ck) {
                std::uint32_t K = cols.list()[static_cast<std::size_t>(ck)].mask();
                Complex d = deriv[static_cast<std::size_t>(rj) * cols.count() + ck];
                if (d == Complex(0.0)) continue;
                if (wrt_zeta) {
                    // dzetabar_m passes |J| dzbar's and n dzeta's, then merges into K
                    std::uint32_t bit = 1u << m;
                    if (K & bit) continue;
                    int s = merge_sign(bit, K);  // sign of dzetabar_m ^ dzetabar_K
                    int hop = (__builtin_popcount(J) + n) & 1 ? -1 : 1;
                    out[static_cast<std::size_t>(rows_out.ordinal(J)) * cols_out.count() +
                        cols_out.ordinal(K | bit)] += static_cast<double>(s * hop) * d;
                } else {
                    std::uint32_t bit = 1u << m;
                    if (J & bit) continue;
                    int s = merge_sign(bit, J);
                    out[static_cast<std::size_t>(rows_out.ordinal(J | bit)) * cols_out.count() +
                        cols_out.ordinal(K)] += static_cast<double>(s) * d;
                }
            }
        }
    }
}

double max_abs(const CVector& v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

double koppelman_residual(const DefiningFunctionPtr& r_smooth, const CPoint& z, const CPoint& zeta,
                          int q, double h, SingularSetGuard guard) {
    const int n = z.dim();
    if (r_smooth->smoothness() != Smoothness::Smooth)
        throw std::invalid_argument("koppelman_residual: requires a smooth defining function (mollify first)");
    KernelEvaluator ev(n, r_smooth, guard);

    // margin: stencil must stay clear of the singular sets
    double sep = dist(z, zeta);
    if (sep < 10.0 * h) throw ProximityError("koppelman_residual: |zeta - z| below the 10h margin");
    {
        CVector g = r_smooth->gradient(zeta);
        Complex p = 0.0;
        for (int j = 0; j < n; ++j) p += g[static_cast<std::size_t>(j)] * (zeta[j] - z[j]);
        if (std::abs(p) < 10.0 * h) throw ProximityError("koppelman_residual: Leray pairing below the 10h margin");
    }

    if (n == 1) {
        CVector a, b;
        ev.eval(KernelKind::Omega0, 0, z, zeta, a);
        ev.eval(KernelKind::Omega1, 0, z, zeta, b);
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }

    double worst = 0.0;

    // (i) dbar_zeta Omega1_{0,q} + dbar_z Omega1_{0,q-1} = 0
    {
        // both pieces have z-degree q and zetabar-degree n-q
        MultiIndexSet rows1(n, q), cols1(n, n - q);
        CVector dz_part, dzeta_part;
        dbar_of_kernel(ev, KernelKind::Omega1, q, z, zeta, true, h, dzeta_part, rows1, cols1);
        if (q >= 1) {
            dbar_of_kernel(ev, KernelKind::Omega1, q - 1, z, zeta, false, h, dz_part, rows1, cols1);
            for (std::size_t i = 0; i < dzeta_part.size(); ++i) dzeta_part[i] += dz_part[i];
        }
        worst = std::max(worst, max_abs(dzeta_part));
    }

    // (ii) dbar_zeta Omega01_{0,q} + dbar_z Omega01_{0,q-1} = Omega0_{0,q} - Omega1_{0,q}
    {
        MultiIndexSet rows1(n, q), cols1(n, n - 1 - q);  // matches Omega0_{0,q} layout
        CVector total(static_cast<std::size_t>(rows1.count()) * cols1.count(), Complex(0.0));
        CVector part;
        if (q <= n - 2) {
            dbar_of_kernel(ev, KernelKind::Omega01, q, z, zeta, true, h, part, rows1, cols1);
            for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
        }
        if (q >= 1 && q - 1 <= n - 2) {
            dbar_of_kernel(ev, KernelKind::Omega01, q - 1, z, zeta, false, h, part, rows1, cols1);
            for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
        }
        CVector om0, om1;
        ev.eval(KernelKind::Omega0, q, z, zeta, om0);
        ev.eval(KernelKind::Omega1, q, z, zeta, om1);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] -= om0[i] - om1[i];
        worst = std::max(worst, max_abs(total));
    }

    return worst;
}

}  // namespace clk
