#include "quadrank/classgroup.hpp"

#include "abelian.hpp"
#include "quadrank/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace quadrank::classgroup {

namespace {

i128 root_floor(i128 d) { return static_cast<i128>(nt::isqrt(static_cast<u128>(d))); }

// Moves b into the standard interval for |a|: (-|a|, |a|] when |a| > sqrt(d),
// (sqrt(d) - 2|a|, sqrt(d)) otherwise.
QForm normalize_indefinite(const QForm& f, i128 d, i128 s) {
    const i128 A = nt::abs(f.a);
    i128 b;
    if (A > s) b = f.b + 2 * A * nt::floor_div(A - f.b, 2 * A);
    else b = s - nt::mod(s - f.b, 2 * A);
    return QForm{f.a, b, (b * b - d) / (4 * f.a)};
}

struct CycleData {
    i128 d;
    std::vector<QForm> forms;
    std::unordered_map<std::size_t, std::vector<std::size_t>> index;
    std::vector<std::size_t> cycle;
    std::vector<std::size_t> representative;  // per cycle, a form with a > 0

    static std::size_t key(const QForm& f) {
        return std::hash<long long>{}(static_cast<long long>(f.a) * 1000003LL + static_cast<long long>(f.b));
    }

    std::size_t find(const QForm& f) const {
        auto it = index.find(key(f));
        if (it != index.end())
            for (auto i : it->second)
                if (forms[i] == f) return i;
        throw std::logic_error("cycle lookup: form not reduced " + to_string(f));
    }
};

CycleData build_cycles(i128 d, CycleWalk walk) {
    CycleData data;
    data.d = d;
    data.forms = reduced_indefinite_forms(d);
    for (std::size_t i = 0; i < data.forms.size(); ++i) data.index[CycleData::key(data.forms[i])].push_back(i);
    const std::size_t none = static_cast<std::size_t>(-1);
    data.cycle.assign(data.forms.size(), none);
    std::size_t next = 0;
    for (std::size_t i = 0; i < data.forms.size(); ++i) {
        if (data.cycle[i] != none) continue;
        std::size_t rep = none;
        QForm f = data.forms[i];
        do {
            std::size_t j = data.find(f);
            if (data.cycle[j] != none) throw std::logic_error("cycle walk entered another cycle");
            data.cycle[j] = next;
            if (rep == none && f.a > 0) rep = j;
            f = walk == CycleWalk::forward ? rho(f) : rho_inverse(f);
        } while (!(f == data.forms[i]));
        if (rep == none) throw std::logic_error("cycle without a positive form");
        data.representative.push_back(rep);
        ++next;
    }
    return data;
}

struct NarrowGroup {
    using element = std::size_t;
    const CycleData* data;
    std::size_t identity;

    std::size_t one() const { return identity; }
    std::size_t op(std::size_t x, std::size_t y) const {
        const auto& fx = data->forms[data->representative[x]];
        const auto& fy = data->forms[data->representative[y]];
        return data->cycle[data->find(reduce_indefinite(compose_raw(fx, fy)))];
    }
    std::size_t inv(std::size_t x) const {
        const auto& f = data->forms[data->representative[x]];
        return data->cycle[data->find(reduce_indefinite(QForm{f.a, -f.b, f.c}))];
    }
    bool equal(std::size_t x, std::size_t y) const { return x == y; }
    std::size_t hash(std::size_t x) const { return x; }
};

}  // namespace

bool is_reduced_indefinite(const QForm& f) {
    const i128 d = f.discriminant();
    if (d <= 0 || f.a == 0) return false;
    const i128 s = root_floor(d);
    const i128 A = nt::abs(f.a);
    return f.b > 0 && f.b <= s && 2 * A + f.b > s && 2 * A - f.b <= s;
}

QForm rho(const QForm& f) {
    const i128 d = f.discriminant();
    require(d > 0 && !nt::is_square(static_cast<u128>(d)), "rho: expects a non-square positive discriminant");
    return normalize_indefinite(QForm{f.c, -f.b, f.a}, d, root_floor(d));
}

QForm rho_inverse(const QForm& f) {
    const i128 d = f.discriminant();
    require(d > 0 && !nt::is_square(static_cast<u128>(d)), "rho_inverse: expects a non-square positive discriminant");
    const i128 s = root_floor(d);
    const i128 A = nt::abs(f.a);
    i128 B = s - nt::mod(s + f.b, 2 * A);
    return QForm{(B * B - d) / (4 * f.a), B, f.a};
}

QForm reduce_indefinite(QForm f) {
    const i128 d = f.discriminant();
    require(d > 0 && !nt::is_square(static_cast<u128>(d)), "reduce_indefinite: expects a non-square positive discriminant");
    require(f.a != 0, "reduce_indefinite: a must be nonzero");
    const i128 s = root_floor(d);
    f = normalize_indefinite(f, d, s);
    while (!is_reduced_indefinite(f)) f = rho(f);
    return f;
}

std::vector<QForm> reduced_indefinite_forms(i128 d) {
    require(d > 0 && !nt::is_square(static_cast<u128>(d)) && nt::mod(d, 4) <= 1,
            "reduced_indefinite_forms: d must be a positive non-square discriminant");
    std::vector<QForm> out;
    const i128 s = root_floor(d);
    for (i128 b = (d % 2 == 0) ? 2 : 1; b <= s; b += 2) {
        const i128 n = (d - b * b) / 4;
        // 2a + b > s and 2a - b <= s
        for (i128 a = (s - b) / 2 + 1; 2 * a - b <= s; ++a) {
            if (a <= 0 || n % a != 0) continue;
            out.push_back(QForm{a, b, -n / a});
            out.push_back(QForm{-a, b, n / a});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> cycle_partition(i128 d, CycleWalk walk) {
    return build_cycles(d, walk).cycle;
}

AbelianGroupStructure narrow_group_structure(i128 d, CycleWalk walk) {
    require(d > 0, "narrow_group_structure: d must be positive");
    if (d > kRealCapacity) throw capacity_error("narrow_group_structure: d above supported bound");
    require(is_fundamental(d), "narrow_group_structure: d must be fundamental");
    const CycleData data = build_cycles(d, walk);
    const std::uint64_t h = data.representative.size();
    const std::size_t identity = data.cycle[data.find(reduce_indefinite(principal_form(d)))];
    NarrowGroup grp{&data, identity};
    detail::SubgroupBuilder<NarrowGroup> builder(grp);
    for (std::size_t x = 0; x < h && builder.order() != h; ++x) {
        if (x == identity) continue;
        builder.add(x, detail::order_dividing(grp, x, h));
    }
    if (builder.order() != h) throw std::logic_error("narrow_group_structure: cycles did not generate");
    return AbelianGroupStructure{builder.invariant_factors()};
}

}  // namespace quadrank::classgroup
