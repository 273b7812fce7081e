#include "voltcheb/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "voltcheb/errors.hpp"

namespace voltcheb {

namespace {

std::size_t cube(int n) {
    const auto e = static_cast<std::size_t>(n);
    return e * e * e;
}

std::string describe_row(const IndexTriple& lmn, double x, double y, double z) {
    std::ostringstream out;
    out.precision(17);
    out << "collocation row (l,m,n) = (" << lmn.i << "," << lmn.j << "," << lmn.k << ") at (" << x << ", " << y
        << ", " << z << ")";
    return out.str();
}

/// Runs body(row) for row in [0, count) on up to `threads` workers, each owning a contiguous
/// block of rows. If any row throws, the exception from the lowest failing row is rethrown.
template <class Body>
void parallel_rows(std::size_t count, int threads, Body&& body) {
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
    if (workers <= 1) {
        for (std::size_t row = 0; row < count; ++row) body(row);
        return;
    }
    std::mutex guard;
    std::size_t failed_row = count;
    std::exception_ptr failure;
    const std::size_t block = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(count, begin + block);
            for (std::size_t row = begin; row < end; ++row) {
                try {
                    body(row);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (row < failed_row) {
                        failed_row = row;
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Geometry of one collocation row: the point, its interpolation row, and (unless the box
/// is empty) the scaled quadrature nodes with per-axis basis tables and kernel samples.
struct RowGeometry {
    IndexTriple lmn;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool degenerate = false;
    std::vector<double> interpolation;  // T*_i(x) T*_j(y) T*_k(z), flat (i,j,k)

    std::size_t q = 0;
    std::vector<double> wr, ws, wt;             // weights scaled to [0,x], [0,y], [0,z]
    std::vector<double> nr, ns, nt;             // scaled nodes
    std::vector<double> tr, ts, tt;             // basis tables, [node * (N+1) + degree]
    std::vector<double> kernel;                 // K at (a,b,c), c fastest
};

RowGeometry make_row(const ProblemSpec& spec, const CollocationGrid& grid, const QuadratureRule& rule,
                     std::size_t row, bool sample_kernel) {
    const int n = grid.order + 1;
    const auto extent = static_cast<std::size_t>(n);
    RowGeometry g;
    g.lmn = unflatten_index(row, n);
    g.x = grid.xs[static_cast<std::size_t>(g.lmn.i)];
    g.y = grid.ys[static_cast<std::size_t>(g.lmn.j)];
    g.z = grid.zs[static_cast<std::size_t>(g.lmn.k)];
    g.degenerate = g.x == 0.0 || g.y == 0.0 || g.z == 0.0;

    std::vector<double> bx(extent), by(extent), bz(extent);
    shifted_cheb_fill(g.x, bx);
    shifted_cheb_fill(g.y, by);
    shifted_cheb_fill(g.z, bz);
    g.interpolation.resize(cube(n));
    for (std::size_t i = 0; i < extent; ++i)
        for (std::size_t j = 0; j < extent; ++j)
            for (std::size_t k = 0; k < extent; ++k) g.interpolation[(i * extent + j) * extent + k] = bx[i] * by[j] * bz[k];

    if (g.degenerate) return g;

    g.q = rule.nodes.size();
    auto axis = [&](double upper, std::vector<double>& w, std::vector<double>& nodes, std::vector<double>& table) {
        w.resize(g.q);
        nodes.resize(g.q);
        table.resize(g.q * extent);
        for (std::size_t a = 0; a < g.q; ++a) {
            w[a] = upper * rule.weights[a];
            nodes[a] = upper * rule.nodes[a];
            shifted_cheb_fill(nodes[a], std::span<double>(table.data() + a * extent, extent));
        }
    };
    axis(g.x, g.wr, g.nr, g.tr);
    axis(g.y, g.ws, g.ns, g.ts);
    axis(g.z, g.wt, g.nt, g.tt);

    if (!sample_kernel) return g;
    g.kernel.resize(g.q * g.q * g.q);
    Bindings b = Bindings::point(g.x, g.y, g.z);
    for (std::size_t a = 0; a < g.q; ++a) {
        b.set(Var::r, g.nr[a]);
        for (std::size_t bb = 0; bb < g.q; ++bb) {
            b.set(Var::s, g.ns[bb]);
            for (std::size_t c = 0; c < g.q; ++c) {
                b.set(Var::t, g.nt[c]);
                double value = 0.0;
                try {
                    value = eval(spec.kernel, b);
                } catch (const EvalError& e) {
                    std::ostringstream node;
                    node.precision(17);
                    node << " (i,j,k) = (0,0,0), node (r,s,t) = (" << g.nr[a] << ", " << g.ns[bb] << ", "
                         << g.nt[c] << ")";
                    throw AssemblyError("kernel evaluation failed for " + describe_row(g.lmn, g.x, g.y, g.z) +
                                        node.str() + ": " + e.what());
                }
                g.kernel[(a * g.q + bb) * g.q + c] = value;
            }
        }
    }
    return g;
}

/// out[(i,j,k)] = sum_{a,b,c} wr_a ws_b wt_c field[a,b,c] Tr[a,i] Ts[b,j] Tt[c,k], by sum factorization.
void contract_basis(const RowGeometry& g, int n, std::span<const double> field, std::span<double> out) {
    const auto e = static_cast<std::size_t>(n);
    const std::size_t q = g.q;
    std::vector<double> c1(q * q * e, 0.0);  // [a,b,k]
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) {
            const double* f = field.data() + (a * q + b) * q;
            double* dst = c1.data() + (a * q + b) * e;
            for (std::size_t c = 0; c < q; ++c) {
                const double wf = g.wt[c] * f[c];
                const double* basis = g.tt.data() + c * e;
                for (std::size_t k = 0; k < e; ++k) dst[k] += wf * basis[k];
            }
        }
    std::vector<double> c2(q * e * e, 0.0);  // [a,j,k]
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) {
            const double* src = c1.data() + (a * q + b) * e;
            for (std::size_t j = 0; j < e; ++j) {
                const double wb = g.ws[b] * g.ts[b * e + j];
                double* dst = c2.data() + (a * e + j) * e;
                for (std::size_t k = 0; k < e; ++k) dst[k] += wb * src[k];
            }
        }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t i = 0; i < e; ++i) {
            const double wa = g.wr[a] * g.tr[a * e + i];
            const double* src = c2.data() + a * e * e;
            double* dst = out.data() + i * e * e;
            for (std::size_t jk = 0; jk < e * e; ++jk) dst[jk] += wa * src[jk];
        }
}

/// u_N at every quadrature node of the row, by sum factorization.
std::vector<double> expand_at_nodes(const RowGeometry& g, int n, std::span<const double> coeffs) {
    const auto e = static_cast<std::size_t>(n);
    const std::size_t q = g.q;
    std::vector<double> d1(e * e * q, 0.0);  // [i,j,c]
    for (std::size_t ij = 0; ij < e * e; ++ij) {
        const double* a = coeffs.data() + ij * e;
        for (std::size_t c = 0; c < q; ++c) {
            const double* basis = g.tt.data() + c * e;
            double sum = 0.0;
            for (std::size_t k = 0; k < e; ++k) sum += a[k] * basis[k];
            d1[ij * q + c] = sum;
        }
    }
    std::vector<double> d2(e * q * q, 0.0);  // [i,b,c]
    for (std::size_t i = 0; i < e; ++i)
        for (std::size_t b = 0; b < q; ++b) {
            double* dst = d2.data() + (i * q + b) * q;
            for (std::size_t j = 0; j < e; ++j) {
                const double tb = g.ts[b * e + j];
                const double* src = d1.data() + (i * e + j) * q;
                for (std::size_t c = 0; c < q; ++c) dst[c] += tb * src[c];
            }
        }
    std::vector<double> u(q * q * q, 0.0);  // [a,b,c]
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t i = 0; i < e; ++i) {
            const double ta = g.tr[a * e + i];
            const double* src = d2.data() + i * q * q;
            double* dst = u.data() + a * q * q;
            for (std::size_t bc = 0; bc < q * q; ++bc) dst[bc] += ta * src[bc];
        }
    return u;
}

double evaluate_forcing(const ProblemSpec& spec, double x, double y, double z, const IndexTriple& lmn) {
    try {
        return eval(spec.f, Bindings::point(x, y, z));
    } catch (const EvalError& e) {
        throw AssemblyError("forcing evaluation failed for " + describe_row(lmn, x, y, z) + ": " + e.what());
    }
}

double apply_nonlinearity(const Expr& g, double u, const RowGeometry& row, std::string_view what) {
    try {
        Bindings b;
        b.set(Var::u, u);
        return eval(g, b);
    } catch (const EvalError& e) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " evaluation failed at u = " << u << " for " << describe_row(row.lmn, row.x, row.y, row.z)
            << ": " << e.what();
        throw AssemblyError(msg.str());
    }
}

void check_order(int order) {
    if (order < 1) throw AssemblyError("collocation order N must be >= 1, got " + std::to_string(order));
}

}  // namespace

AssembledLinearSystem assemble_linear(const ProblemSpec& input, int order, const QuadratureRule& rule,
                                      const AssemblyOptions& options) {
    check_order(order);
    if (!input.is_linear()) {
        throw AssemblyError("assemble_linear requires a linear spec; nonlinearity is '" +
                            to_string(input.nonlinearity) + "'");
    }
    const ProblemSpec spec = to_unit_box(input);
    const int n = order + 1;
    const std::size_t size = cube(n);

    AssembledLinearSystem sys;
    sys.order = order;
    sys.grid = gcl_points(order);
    sys.matrix = DenseMatrix(size, size);
    sys.rhs.assign(size, 0.0);

    parallel_rows(size, options.threads, [&](std::size_t row) {
        const RowGeometry g = make_row(spec, sys.grid, rule, row, true);
        std::span<double> out = sys.matrix.row(row);
        if (!g.degenerate) contract_basis(g, n, g.kernel, out);
        for (std::size_t col = 0; col < size; ++col) out[col] = g.interpolation[col] - out[col];
        sys.rhs[row] = evaluate_forcing(spec, g.x, g.y, g.z, g.lmn);
    });
    return sys;
}

ResidualSystem::ResidualSystem(const ProblemSpec& spec, int order, QuadratureRule rule, AssemblyOptions options,
                               JacobianMode mode)
    : spec_(to_unit_box(spec)),
      order_(order),
      rule_(std::move(rule)),
      options_(options),
      mode_(mode) {
    check_order(order);
    validate_problem(spec_);
    derivative_ = differentiate_u(spec_.nonlinearity);
    grid_ = gcl_points(order);
    const int n = order + 1;
    forcing_.assign(cube(n), 0.0);
    for (std::size_t row = 0; row < forcing_.size(); ++row) {
        const IndexTriple lmn = unflatten_index(row, n);
        const double x = grid_.xs[static_cast<std::size_t>(lmn.i)];
        const double y = grid_.ys[static_cast<std::size_t>(lmn.j)];
        const double z = grid_.zs[static_cast<std::size_t>(lmn.k)];
        forcing_[row] = evaluate_forcing(spec_, x, y, z, lmn);
    }
}

std::vector<double> ResidualSystem::residual(std::span<const double> coeffs) const {
    if (coeffs.size() != size()) throw DomainError("coefficient vector has the wrong length");
    const int n = order_ + 1;
    std::vector<double> out(size(), 0.0);
    parallel_rows(size(), options_.threads, [&](std::size_t row) {
        const RowGeometry g = make_row(spec_, grid_, rule_, row, true);
        double interp = 0.0;
        for (std::size_t col = 0; col < coeffs.size(); ++col) interp += g.interpolation[col] * coeffs[col];
        double integral = 0.0;
        if (!g.degenerate) {
            const std::vector<double> u = expand_at_nodes(g, n, coeffs);
            const std::size_t q = g.q;
            for (std::size_t a = 0; a < q; ++a) {
                double plane = 0.0;
                for (std::size_t b = 0; b < q; ++b) {
                    double line = 0.0;
                    for (std::size_t c = 0; c < q; ++c) {
                        const std::size_t idx = (a * q + b) * q + c;
                        line += g.wt[c] * g.kernel[idx] * apply_nonlinearity(spec_.nonlinearity, u[idx], g, "nonlinearity");
                    }
                    plane += g.ws[b] * line;
                }
                integral += g.wr[a] * plane;
            }
        }
        out[row] = interp - integral - forcing_[row];
    });
    return out;
}

DenseMatrix ResidualSystem::jacobian(std::span<const double> coeffs) const {
    return mode_ == JacobianMode::analytic ? analytic_jacobian(coeffs) : finite_difference_jacobian(coeffs);
}

DenseMatrix ResidualSystem::analytic_jacobian(std::span<const double> coeffs) const {
    if (coeffs.size() != size()) throw DomainError("coefficient vector has the wrong length");
    const int n = order_ + 1;
    DenseMatrix jac(size(), size());
    const bool linear = spec_.is_linear();
    parallel_rows(size(), options_.threads, [&](std::size_t row) {
        const RowGeometry g = make_row(spec_, grid_, rule_, row, true);
        std::span<double> out = jac.row(row);
        if (!g.degenerate) {
            std::vector<double> field = g.kernel;
            if (!linear) {
                const std::vector<double> u = expand_at_nodes(g, n, coeffs);
                for (std::size_t idx = 0; idx < field.size(); ++idx) {
                    field[idx] *= apply_nonlinearity(derivative_, u[idx], g, "nonlinearity derivative");
                }
            }
            contract_basis(g, n, field, out);
        }
        for (std::size_t col = 0; col < out.size(); ++col) out[col] = g.interpolation[col] - out[col];
    });
    return jac;
}

DenseMatrix ResidualSystem::finite_difference_jacobian(std::span<const double> coeffs, double step) const {
    if (coeffs.size() != size()) throw DomainError("coefficient vector has the wrong length");
    DenseMatrix jac(size(), size());
    std::vector<double> probe(coeffs.begin(), coeffs.end());
    for (std::size_t col = 0; col < size(); ++col) {
        const double h = step * std::max(1.0, std::abs(coeffs[col]));
        probe[col] = coeffs[col] + h;
        const std::vector<double> plus = residual(probe);
        probe[col] = coeffs[col] - h;
        const std::vector<double> minus = residual(probe);
        probe[col] = coeffs[col];
        for (std::size_t row = 0; row < size(); ++row) jac(row, col) = (plus[row] - minus[row]) / (2.0 * h);
    }
    return jac;
}

ResidualSystem build_residual_system(const ProblemSpec& spec, int order, const QuadratureRule& rule,
                                     const AssemblyOptions& options, JacobianMode mode) {
    return ResidualSystem(spec, order, rule, options, mode);
}

}  // namespace voltcheb
