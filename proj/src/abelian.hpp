#pragma once

// Structure of a finite abelian group generated by known elements.
//
// Each Sylow p-subgroup keeps a basis b_1..b_r with orders p^a_j. A new
// element z of order p^c is reduced to its first power z^(p^e) that lies
// in the current subgroup (discrete logs by multi-dimensional BSGS over the
// basis); the relation lattice is then rediagonalized with Smith normal
// form to give the new basis.
//
// G must provide: element, one(), op(x, y), inv(x), hash(x), equality.

#include "quadrank/errors.hpp"
#include "quadrank/snf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace quadrank::detail {

template <class G>
typename G::element group_pow(const G& grp, typename G::element x, std::uint64_t e) {
    auto acc = grp.one();
    while (e > 0) {
        if (e & 1) acc = grp.op(acc, x);
        e >>= 1;
        if (e) x = grp.op(x, x);
    }
    return acc;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline std::uint64_t ceil_sqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while (r * r < n) ++r;
    return r;
}

/// Order of x given a multiple of it.
template <class G>
std::uint64_t order_dividing(const G& grp, const typename G::element& x, std::uint64_t multiple) {
    std::uint64_t ord = multiple;
    for (auto [q, e] : factor_u64(multiple)) {
        for (unsigned i = 0; i < e; ++i) {
            if (grp.equal(group_pow(grp, x, ord / q), grp.one())) ord /= q;
            else break;
        }
    }
    return ord;
}

/// Order of x by baby-step giant-step, searching up to `bound`.
template <class G>
std::optional<std::uint64_t> order_bsgs(const G& grp, const typename G::element& x, std::uint64_t bound) {
    const auto id = grp.one();
    if (grp.equal(x, id)) return 1;
    const std::uint64_t m = ceil_sqrt(bound);
    std::unordered_map<std::size_t, std::vector<std::uint64_t>> baby;
    baby.reserve(m * 2);
    auto cur = id;
    for (std::uint64_t j = 0; j < m; ++j) {
        if (j > 0 && grp.equal(cur, id)) return j;
        baby[grp.hash(cur)].push_back(j);
        cur = grp.op(cur, x);
    }
    // cur = x^m
    const auto step = cur;
    auto giant = step;
    for (std::uint64_t i = 1; i <= m + 1; ++i) {
        auto it = baby.find(grp.hash(giant));
        if (it != baby.end()) {
            for (auto j : it->second) {
                if (grp.equal(group_pow(grp, x, j), giant)) return i * m - j;
            }
        }
        giant = grp.op(giant, step);
    }
    return std::nullopt;
}

template <class G>
class SylowBasis {
public:
    using E = typename G::element;

    SylowBasis(const G& grp, std::uint64_t p) : grp_(&grp), p_(p) {}

    std::uint64_t prime() const { return p_; }
    const std::vector<std::uint64_t>& orders() const { return orders_; }
    const std::vector<E>& basis() const { return basis_; }

    std::uint64_t order() const {
        std::uint64_t o = 1;
        for (auto x : orders_) o *= x;
        return o;
    }

    /// Coordinates of w on the basis, or nullopt if w is outside the span.
    std::optional<std::vector<std::uint64_t>> dlog(const E& w) {
        const G& grp = *grp_;
        const std::size_t r = basis_.size();
        if (r == 0) {
            if (grp.equal(w, grp.one())) return std::vector<std::uint64_t>{};
            return std::nullopt;
        }
        if (!table_built_) build_table();
        std::vector<std::uint64_t> k(r, 0), limits(r);
        for (std::size_t j = 0; j < r; ++j) limits[j] = (orders_[j] + m_[j] - 1) / m_[j];
        auto cur = w;
        while (true) {
            auto it = table_.find(grp.hash(cur));
            if (it != table_.end()) {
                for (const auto& entry : it->second) {
                    if (!grp.equal(entry.first, cur)) continue;
                    std::vector<std::uint64_t> x(r);
                    std::uint64_t code = entry.second;
                    for (std::size_t j = 0; j < r; ++j) {
                        x[j] = (code % m_[j] + m_[j] * k[j]) % orders_[j];
                        code /= m_[j];
                    }
                    return x;
                }
            }
            // odometer over giant-step counts
            std::size_t j = 0;
            for (; j < r; ++j) {
                if (++k[j] < limits[j]) {
                    cur = grp.op(cur, giant_[j]);
                    break;
                }
                k[j] = 0;
                cur = grp.op(cur, giant_reset_[j]);
            }
            if (j == r) return std::nullopt;
        }
    }

    /// Adds z, an element of order p^c (given as `order`).
    void add(const E& z, std::uint64_t order) {
        const G& grp = *grp_;
        if (order == 1) return;
        auto w = z;
        std::uint64_t pe = 1;
        std::optional<std::vector<std::uint64_t>> x;
        while (!(x = dlog(w))) {
            w = group_pow(grp, w, p_);
            pe *= p_;
        }
        if (pe == 1) return;

        const std::size_t r = basis_.size();
        IntMatrix R(r + 1, std::vector<i128>(r + 1, 0));
        for (std::size_t j = 0; j < r; ++j) {
            R[j][j] = orders_[j];
            R[r][j] = -static_cast<i128>((*x)[j]);
        }
        R[r][r] = pe;
        auto snf = smith_normal_form(R);

        std::vector<E> nb;
        std::vector<std::uint64_t> no;
        for (std::size_t k = 0; k <= r; ++k) {
            auto dk = snf.diagonal[k];
            if (dk == 1) continue;
            auto g = grp.one();
            for (std::size_t i = 0; i < r; ++i) {
                auto ex = nt::mod(snf.V_inverse[k][i], orders_[i]);
                g = grp.op(g, group_pow(grp, basis_[i], static_cast<std::uint64_t>(ex)));
            }
            auto ez = nt::mod(snf.V_inverse[k][r], order);
            g = grp.op(g, group_pow(grp, z, static_cast<std::uint64_t>(ez)));
            nb.push_back(g);
            no.push_back(static_cast<std::uint64_t>(dk));
        }
        basis_ = std::move(nb);
        orders_ = std::move(no);
        table_built_ = false;
        table_.clear();
    }

private:
    void build_table() {
        const G& grp = *grp_;
        const std::size_t r = basis_.size();
        m_.assign(r, 1);
        std::uint64_t total = 1;
        for (std::size_t j = 0; j < r; ++j) {
            m_[j] = ceil_sqrt(orders_[j]);
            total *= m_[j];
        }
        table_.clear();
        table_.reserve(total * 2);
        std::vector<std::uint64_t> c(r, 0);
        auto cur = grp.one();
        std::vector<E> reset(r);
        for (std::size_t j = 0; j < r; ++j) reset[j] = grp.inv(group_pow(grp, basis_[j], m_[j] - 1));
        for (std::uint64_t code = 0; code < total; ++code) {
            table_[grp.hash(cur)].emplace_back(cur, code);
            for (std::size_t j = 0; j < r; ++j) {
                if (++c[j] < m_[j]) {
                    cur = grp.op(cur, basis_[j]);
                    break;
                }
                c[j] = 0;
                cur = grp.op(cur, reset[j]);
            }
        }
        giant_.assign(r, grp.one());
        giant_reset_.assign(r, grp.one());
        for (std::size_t j = 0; j < r; ++j) {
            giant_[j] = grp.inv(group_pow(grp, basis_[j], m_[j]));
            std::uint64_t limit = (orders_[j] + m_[j] - 1) / m_[j];
            giant_reset_[j] = group_pow(grp, basis_[j], (m_[j] * (limit - 1)) % orders_[j]);
        }
        table_built_ = true;
    }

    const G* grp_;
    std::uint64_t p_;
    std::vector<E> basis_;
    std::vector<std::uint64_t> orders_;
    bool table_built_ = false;
    std::vector<std::uint64_t> m_;
    std::unordered_map<std::size_t, std::vector<std::pair<E, std::uint64_t>>> table_;
    std::vector<E> giant_, giant_reset_;
};

template <class G>
class SubgroupBuilder {
public:
    using E = typename G::element;

    explicit SubgroupBuilder(const G& grp) : grp_(&grp) {}

    /// Adds x, whose exact order is `order`.
    void add(const E& x, std::uint64_t order) {
        for (auto [p, e] : factor_u64(order)) {
            std::uint64_t pe = 1;
            for (unsigned i = 0; i < e; ++i) pe *= p;
            auto z = group_pow(*grp_, x, order / pe);
            auto it = sylow_.find(p);
            if (it == sylow_.end()) it = sylow_.emplace(p, SylowBasis<G>(*grp_, p)).first;
            it->second.add(z, pe);
        }
    }

    std::uint64_t order() const {
        std::uint64_t o = 1;
        for (const auto& [p, s] : sylow_) o *= s.order();
        return o;
    }

    /// Invariant factors d_1 | d_2 | ... (all >= 2).
    std::vector<std::uint64_t> invariant_factors() const {
        std::size_t rank = 0;
        std::vector<std::vector<std::uint64_t>> parts;
        for (const auto& [p, s] : sylow_) {
            auto o = s.orders();
            std::sort(o.begin(), o.end());
            rank = std::max(rank, o.size());
            parts.push_back(std::move(o));
        }
        std::vector<std::uint64_t> out(rank, 1);
        for (const auto& o : parts) {
            std::size_t offset = rank - o.size();
            for (std::size_t i = 0; i < o.size(); ++i) out[offset + i] *= o[i];
        }
        return out;
    }

private:
    const G* grp_;
    std::map<std::uint64_t, SylowBasis<G>> sylow_;
};

}  // namespace quadrank::detail
