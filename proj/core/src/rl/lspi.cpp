#include "cbrl/rl/lspi.hpp"

#include <string>

namespace cbrl::rl {

ActionBlockedBasis::ActionBlockedBasis(std::size_t feature_dim, std::size_t actions, bool bias)
    : feature_dim_(feature_dim), actions_(actions), bias_(bias) {
    if (actions == 0 || block_size() == 0) {
        throw std::invalid_argument("basis needs at least one action and one feature");
    }
}

Eigen::VectorXd ActionBlockedBasis::block(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != feature_dim_) {
        throw std::invalid_argument("feature dimension mismatch");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(block_size()));
    out.head(x.size()) = x;
    if (bias_) {
        out(out.size() - 1) = 1.0;
    }
    return out;
}

Eigen::VectorXd ActionBlockedBasis::operator()(const Eigen::VectorXd& x, int action) const {
    if (action < 0 || static_cast<std::size_t>(action) >= actions_) {
        throw std::out_of_range("action outside the basis");
    }
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
    const auto bs = static_cast<Eigen::Index>(block_size());
    phi.segment(action * bs, bs) = block(x);
    return phi;
}

LinearQ::LinearQ(ActionBlockedBasis basis)
    : basis_(basis), w_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()))) {}

LinearQ::LinearQ(ActionBlockedBasis basis, Eigen::VectorXd weights) : basis_(basis) {
    set_weights(std::move(weights));
}

void LinearQ::set_weights(Eigen::VectorXd w) {
    if (static_cast<std::size_t>(w.size()) != basis_.dimension()) {
        throw std::invalid_argument("weight vector does not match the basis dimension");
    }
    w_ = std::move(w);
}

double LinearQ::value(const Eigen::VectorXd& x, int action) const {
    const auto bs = static_cast<Eigen::Index>(basis_.block_size());
    return w_.segment(action * bs, bs).dot(basis_.block(x));
}

std::vector<double> LinearQ::values(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd xb = basis_.block(x);
    const auto bs = static_cast<Eigen::Index>(basis_.block_size());
    std::vector<double> out(basis_.actions());
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = w_.segment(static_cast<Eigen::Index>(a) * bs, bs).dot(xb);
    }
    return out;
}

int LinearQ::greedy(const Eigen::VectorXd& x) const {
    const auto v = values(x);
    std::size_t best = 0;
    for (std::size_t a = 1; a < v.size(); ++a) {
        if (v[a] > v[best]) {
            best = a;
        }
    }
    return static_cast<int>(best);
}

LstdqSolution solve_lstdq_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SolveOptions& options) {
    LstdqSolution out;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    Eigen::MatrixXd system = a;
    if (lu.rank() < a.rows() || !(lu.rcond() >= options.rcond_threshold)) {
        system.diagonal().array() += options.ridge;
        lu.compute(system);
        out.ridge_used = true;
    }
    out.w = lu.solve(b);
    if (!out.w.allFinite()) {
        throw SolverError("LSTDQ solve produced non-finite weights");
    }
    const double residual = (system * out.w - b).norm();
    if (!(residual <= 1e-6 * (1.0 + b.norm()))) {
        throw SolverError("LSTDQ solve did not converge (residual " + std::to_string(residual) + ")");
    }
    return out;
}

LstdqSolution lstdq(std::span<const Transition> samples, const ActionBlockedBasis& basis, const Policy& policy,
                    double gamma, const SolveOptions& options) {
    if (samples.empty()) {
        throw std::invalid_argument("lstdq needs at least one sample");
    }
    const auto n = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (const auto& s : samples) {
        const Eigen::VectorXd phi = basis(s.x, s.action);
        const Eigen::VectorXd phi_next = basis(s.x_next, policy(s.x_next));
        a.noalias() += s.weight * phi * (phi - gamma * phi_next).transpose();
        b.noalias() += s.weight * s.reward * phi;
    }
    return solve_lstdq_system(a, b, options);
}

LstdqAccumulator::LstdqAccumulator(ActionBlockedBasis basis)
    : basis_(basis),
      c_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.dimension()),
                               static_cast<Eigen::Index>(basis.dimension()))),
      b_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dimension()))),
      base_cross_(basis.actions(), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.block_size()),
                                                         static_cast<Eigen::Index>(basis.block_size()))),
      sums_(basis.actions()) {}

void LstdqAccumulator::add(const Eigen::VectorXd& x, int action, double reward, std::uint64_t next_key,
                           const Eigen::VectorXd& x_next, double weight) {
    if (action < 0 || static_cast<std::size_t>(action) >= basis_.actions()) {
        throw std::out_of_range("action outside the basis");
    }
    const auto bs = static_cast<Eigen::Index>(basis_.block_size());
    const Eigen::VectorXd xb = basis_.block(x);
    const Eigen::Index off = action * bs;
    c_.block(off, off, bs, bs).noalias() += weight * xb * xb.transpose();
    b_.segment(off, bs).noalias() += weight * reward * xb;

    auto [it, inserted] = index_.try_emplace(next_key, index_.size());
    if (inserted) {
        const Eigen::VectorXd nb = basis_.block(x_next);
        next_blocks_.insert(next_blocks_.end(), nb.data(), nb.data() + bs);
        for (auto& s : sums_) {
            s.resize(s.size() + static_cast<std::size_t>(bs), 0.0);
        }
    }
    const auto col = static_cast<Eigen::Index>(it->second);
    Eigen::Map<const Eigen::VectorXd> next_block(next_blocks_.data() + col * bs, bs);
    Eigen::Map<Eigen::VectorXd>(sums_[static_cast<std::size_t>(action)].data() + col * bs, bs) += weight * xb;
    base_cross_[static_cast<std::size_t>(action)].noalias() += weight * xb * next_block.transpose();
    ++samples_;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> LstdqAccumulator::system(const LinearQ& q, double gamma) const {
    const auto bs = static_cast<Eigen::Index>(basis_.block_size());
    const auto actions = static_cast<Eigen::Index>(basis_.actions());
    const auto m = static_cast<Eigen::Index>(index_.size());
    using ColMajor = Eigen::Map<const Eigen::MatrixXd>;

    Eigen::MatrixXd a = c_;
    for (Eigen::Index k = 0; k < actions; ++k) {
        a.block(k * bs, 0, bs, bs) -= gamma * base_cross_[static_cast<std::size_t>(k)];
    }
    if (actions == 1 || m == 0) {
        return {std::move(a), b_};
    }

    const ColMajor blocks(next_blocks_.data(), bs, m);
    const Eigen::MatrixXd w = Eigen::Map<const Eigen::MatrixXd>(q.weights().data(), bs, actions);
    const Eigen::MatrixXd values = w.transpose() * blocks;  // actions x m
    // greedy action at each next state, lowest index on ties
    std::vector<Eigen::Index> chosen(static_cast<std::size_t>(m), 0);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 1; k < actions; ++k) {
            if (values(k, j) > values(chosen[static_cast<std::size_t>(j)], j)) {
                chosen[static_cast<std::size_t>(j)] = k;
            }
        }
    }
    // move the cross term of next states choosing c from block column 0 to c
    for (Eigen::Index c = 1; c < actions; ++c) {
        Eigen::MatrixXd masked = blocks;
        bool any = false;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (chosen[static_cast<std::size_t>(j)] != c) {
                masked.col(j).setZero();
            } else {
                any = true;
            }
        }
        if (!any) {
            continue;
        }
        for (Eigen::Index k = 0; k < actions; ++k) {
            const ColMajor sums(sums_[static_cast<std::size_t>(k)].data(), bs, m);
            const Eigen::MatrixXd cross = gamma * sums * masked.transpose();
            a.block(k * bs, c * bs, bs, bs) -= cross;
            a.block(k * bs, 0, bs, bs) += cross;
        }
    }
    return {std::move(a), b_};
}

LstdqSolution LstdqAccumulator::solve(const LinearQ& q, double gamma, const SolveOptions& options) const {
    if (samples_ == 0) {
        throw std::invalid_argument("lstdq needs at least one sample");
    }
    const auto [a, b] = system(q, gamma);
    return solve_lstdq_system(a, b, options);
}

namespace {

template <class Evaluate>
LspiResult iterate(const ActionBlockedBasis& basis, const LspiOptions& options,
                   const std::optional<Eigen::VectorXd>& initial, Evaluate&& evaluate) {
    if (options.max_iterations < 1) {
        throw std::invalid_argument("lspi needs at least one iteration");
    }
    LinearQ q = initial ? LinearQ(basis, *initial) : LinearQ(basis);
    LspiResult result;
    for (int it = 1; it <= options.max_iterations; ++it) {
        LstdqSolution next;
        try {
            next = evaluate(q);
        } catch (const SolverError& e) {
            throw SolverError("LSPI iteration " + std::to_string(it) + ": " + e.what());
        }
        const double step = (next.w - q.weights()).norm();
        result.ridge_used = result.ridge_used || next.ridge_used;
        q.set_weights(std::move(next.w));
        result.iterations = it;
        if (step < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.w = q.weights();
    return result;
}

}  // namespace

LspiResult lspi(std::span<const Transition> samples, const ActionBlockedBasis& basis, const LspiOptions& options,
                const std::optional<Eigen::VectorXd>& initial) {
    return iterate(basis, options, initial, [&](const LinearQ& q) {
        return lstdq(samples, basis, [&q](const Eigen::VectorXd& x) { return q.greedy(x); }, options.gamma,
                     options.solve);
    });
}

LspiResult lspi(const LstdqAccumulator& stats, const LspiOptions& options,
                const std::optional<Eigen::VectorXd>& initial) {
    return iterate(stats.basis(), options, initial,
                   [&](const LinearQ& q) { return stats.solve(q, options.gamma, options.solve); });
}

}  // namespace cbrl::rl
