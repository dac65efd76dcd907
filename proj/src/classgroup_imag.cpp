#include "quadrank/classgroup.hpp"

#include "abelian.hpp"
#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace quadrank::classgroup {

namespace {

struct ImaginaryGroup {
    using element = QForm;
    i128 d;

    QForm one() const { return principal_form(d); }
    QForm op(const QForm& x, const QForm& y) const { return compose(x, y); }
    QForm inv(const QForm& x) const { return inverse(x); }
    bool equal(const QForm& x, const QForm& y) const { return x == y; }
    std::size_t hash(const QForm& x) const {
        auto a = static_cast<std::uint64_t>(x.a) ^ static_cast<std::uint64_t>(x.a >> 64);
        auto b = static_cast<std::uint64_t>(x.b) ^ static_cast<std::uint64_t>(x.b >> 64);
        return std::hash<std::uint64_t>{}(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL));
    }
};

void normalize(QForm& f) {
    if (-f.a < f.b && f.b <= f.a) return;
    i128 r = nt::floor_div(f.a - f.b, 2 * f.a);
    f.c = f.c + r * (f.b + f.a * r);
    f.b = f.b + 2 * f.a * r;
}

}  // namespace

std::string to_string(const QForm& f) {
    return "(" + nt::to_string(f.a) + "," + nt::to_string(f.b) + "," + nt::to_string(f.c) + ")";
}

std::uint64_t AbelianGroupStructure::order() const {
    std::uint64_t o = 1;
    for (auto x : elementary_divisors) o *= x;
    return o;
}

std::string to_string(const AbelianGroupStructure& g) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < g.elementary_divisors.size(); ++i)
        os << (i ? "," : "") << g.elementary_divisors[i];
    os << "]";
    return os.str();
}

int m_rank(const AbelianGroupStructure& g, std::uint64_t m) {
    require(m > 1, "m_rank: m must exceed 1");
    int best = -1;
    for (auto [p, e] : detail::factor_u64(m)) {
        std::uint64_t pe = 1;
        for (unsigned i = 0; i < e; ++i) pe *= p;
        int count = 0;
        for (auto d : g.elementary_divisors)
            if (d % pe == 0) ++count;
        best = best < 0 ? count : std::min(best, count);
    }
    return best;
}

QuadraticField quadratic_field(const mpz_class& t) {
    require(t != 0 && t != 1, "quadratic_field: t must not be 0 or 1");
    require(arith::is_kfree(t, 2), "quadratic_field: t must be squarefree");
    QuadraticField k;
    k.t = t;
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), t.get_mpz_t(), 4);
    k.d = r == 1 ? t : mpz_class(4 * t);
    k.imaginary = t < 0;
    return k;
}

i128 fundamental_discriminant(i128 t) {
    return nt::to_i128(quadratic_field(nt::to_mpz(t)).d);
}

bool is_fundamental(i128 d) {
    if (d == 0 || d == 1) return false;
    i128 r = nt::mod(d, 4);
    if (r == 1) return arith::is_kfree(nt::to_mpz(d), 2);
    if (r != 0) return false;
    i128 m = d / 4;
    i128 rm = nt::mod(m, 4);
    if (rm != 2 && rm != 3) return false;
    return arith::is_kfree(nt::to_mpz(m), 2);
}

// --- imaginary forms -------------------------------------------------------

bool is_reduced(const QForm& f) {
    if (f.a <= 0) return false;
    if (!(nt::abs(f.b) <= f.a && f.a <= f.c)) return false;
    if ((nt::abs(f.b) == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

QForm reduce(QForm f) {
    require(f.a > 0 && f.discriminant() < 0, "reduce: expects a positive definite form");
    normalize(f);
    while (f.a > f.c) {
        f = QForm{f.c, -f.b, f.a};
        normalize(f);
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

QForm principal_form(i128 d) {
    i128 b = nt::mod(d, 2);
    return QForm{1, b, (b * b - d) / 4};
}

QForm inverse(const QForm& f) {
    QForm g{f.a, -f.b, f.c};
    if (f.discriminant() < 0) return reduce(g);
    return g;
}

QForm compose_raw(const QForm& f1, const QForm& f2) {
    require(f1.discriminant() == f2.discriminant(), "compose: discriminants differ");
    require(f1.a > 0 && f2.a > 0, "compose: leading coefficients must be positive");
    QForm x = f1, y = f2;
    if (x.a > y.a) std::swap(x, y);
    const i128 D = x.discriminant();
    const i128 s = (x.b + y.b) / 2;
    const i128 n = y.b - s;

    i128 y1, d;
    if (y.a % x.a == 0) {
        y1 = 0;
        d = x.a;
    } else {
        i128 u, v;
        d = nt::xgcd(y.a, x.a, u, v);
        y1 = u;
    }
    i128 x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        i128 u, v;
        d1 = nt::xgcd(s, d, u, v);
        x2 = u;
        y2 = -v;
    }
    const i128 v1 = x.a / d1;
    const i128 v2 = y.a / d1;
    // y1*y2*n and x2*c2 stay below 2^126 inside the capacity bound; reduce
    // the factors first anyway.
    i128 t1 = nt::mod(nt::mod(y1, v1) * nt::mod(y2, v1), v1);
    i128 r = nt::mod(t1 * nt::mod(n, v1) - nt::mod(x2, v1) * nt::mod(y.c, v1), v1);
    QForm out;
    out.a = v1 * v2;
    out.b = y.b + 2 * v2 * r;
    out.c = (y.c * d1 + r * (y.b + v2 * r)) / v1;
    if (out.discriminant() != D) throw std::logic_error("compose: discriminant mismatch");
    return out;
}

QForm compose(const QForm& f1, const QForm& f2) {
    require(f1.discriminant() == f2.discriminant(), "compose: discriminants differ");
    return reduce(compose_raw(f1, f2));
}

QForm power(const QForm& f, std::uint64_t e) {
    return detail::group_pow(ImaginaryGroup{f.discriminant()}, f, e);
}

std::vector<QForm> reduced_forms(i128 d) {
    require(d < 0 && is_fundamental(d), "reduced_forms: d must be a negative fundamental discriminant");
    std::vector<QForm> out;
    const i128 amax = static_cast<i128>(nt::isqrt(static_cast<u128>(-d / 3)));
    for (i128 a = 1; a <= amax; ++a) {
        for (i128 b = -a + 1; b <= a; ++b) {
            if (nt::mod(b - d, 2) != 0) continue;
            i128 num = b * b - d;
            if (num % (4 * a) != 0) continue;
            i128 c = num / (4 * a);
            if (c < a) continue;
            if (c == a && b < 0) continue;
            out.push_back(QForm{a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<QForm> prime_form(i128 d, std::uint64_t p) {
    int k = nt::kronecker(d, p);
    if (k == -1) return std::nullopt;
    i128 b;
    if (p == 2) {
        // b^2 = d (mod 8) with b = d (mod 2)
        i128 r = nt::mod(d, 8);
        b = r == 1 ? 1 : r == 0 ? 0 : 2;
    } else {
        std::uint64_t dm = static_cast<std::uint64_t>(nt::mod(d, static_cast<i128>(p)));
        std::uint64_t root = dm == 0 ? 0 : nt::sqrt_mod_prime(dm, p);
        b = root;
        // b must share parity with d
        if (nt::mod(b - d, 2) != 0) b = static_cast<i128>(p) - b;
    }
    QForm f{static_cast<i128>(p), b, (b * b - d) / (4 * static_cast<i128>(p))};
    if (f.discriminant() != d) return std::nullopt;
    return f;
}

ClassNumberWindow class_number_window(i128 d) {
    require(d < 0, "class_number_window: d must be negative");
    static const auto primes = arith::primes_below(1u << 18);
    long double L = 1;
    for (auto p : primes) {
        int k = nt::kronecker(d, p);
        L *= 1.0L / (1.0L - static_cast<long double>(k) / p);
    }
    long double w = (d == -3) ? 3 : (d == -4) ? 2 : 1;
    long double est = std::sqrt(static_cast<long double>(-d)) / std::numbers::pi_v<long double> * L * w;
    ClassNumberWindow out;
    out.estimate = static_cast<double>(est);
    out.lo = static_cast<std::uint64_t>(std::max<long double>(1, std::floor(est / 1.25L)));
    out.hi = static_cast<std::uint64_t>(std::ceil(est * 1.25L));
    return out;
}

StructureReport group_structure_report(i128 d) {
    require(d < 0, "group_structure: d must be negative");
    if (-d > kImaginaryCapacity) throw capacity_error("group_structure: |d| above supported bound");
    require(is_fundamental(d), "group_structure: d must be fundamental");

    ImaginaryGroup grp{d};
    detail::SubgroupBuilder<ImaginaryGroup> builder(grp);
    StructureReport report;

    std::optional<std::uint64_t> h_known;
    ClassNumberWindow window;
    if (-d <= kEnumerationLimit) {
        h_known = reduced_forms(d).size();
        report.certified_by = Certification::enumeration;
    } else {
        window = class_number_window(d);
        report.certified_by = Certification::analytic_window;
    }

    const double logd = std::log(static_cast<double>(-d));
    const auto bach = static_cast<std::uint64_t>(std::ceil(6 * logd * logd));
    const auto generation_bound = static_cast<std::uint64_t>(nt::isqrt(static_cast<u128>(-d / 3))) + 1;
    const std::uint64_t max_prime = h_known ? generation_bound : std::min(bach, generation_bound);
    // Upper bound h(d) < sqrt|d| (log|d| + 2) / pi, used when the window fails.
    const auto h_ceiling =
        static_cast<std::uint64_t>(std::sqrt(static_cast<double>(-d)) * (logd + 2) / std::numbers::pi) + 1;

    constexpr std::size_t kMinGenerators = 40;
    std::uint64_t h_assumed = h_known.value_or(0);  // 0: unknown
    auto done = [&](std::uint64_t H) {
        if (h_known) return H == *h_known;
        return H >= window.lo && H <= window.hi;
    };

    if (h_known && *h_known == 1) return report;

    std::size_t split_seen = 0;
    for (std::uint64_t p = 2; p <= max_prime; ++p) {
        if (!arith::is_prime(mpz_class(static_cast<unsigned long>(p)))) continue;
        auto pf = prime_form(d, p);
        if (!pf) continue;
        ++split_seen;
        QForm y = reduce(*pf);
        std::uint64_t ord;
        if (h_assumed) {
            ord = detail::order_dividing(grp, y, h_assumed);
        } else {
            auto o = detail::order_bsgs(grp, y, window.hi);
            if (!o) o = detail::order_bsgs(grp, y, h_ceiling);
            if (!o) throw std::logic_error("group_structure: element order not found");
            ord = *o;
        }
        // If the assumed h is not a multiple of the order the window was wrong.
        if (h_assumed && !grp.equal(power(y, h_assumed), grp.one())) {
            h_assumed = 0;
            report.certified_by = Certification::bach_bound;
            auto o = detail::order_bsgs(grp, y, h_ceiling);
            if (!o) throw std::logic_error("group_structure: element order not found");
            ord = *o;
        }
        builder.add(y, ord);
        ++report.generators_used;
        const auto H = builder.order();
        if (h_known) {
            if (H == *h_known) break;
            continue;
        }
        if (report.certified_by == Certification::analytic_window) {
            if (done(H)) h_assumed = H;
            else if (h_assumed) {
                h_assumed = 0;
                report.certified_by = Certification::bach_bound;
            }
            if (done(H) && split_seen >= kMinGenerators) break;
        }
    }
    if (h_known && builder.order() != *h_known)
        throw std::logic_error("group_structure: prime forms did not generate the class group");
    if (!h_known && report.certified_by == Certification::analytic_window && !done(builder.order()))
        report.certified_by = Certification::bach_bound;
    report.structure.elementary_divisors = builder.invariant_factors();
    return report;
}

AbelianGroupStructure group_structure(i128 d) {
    return group_structure_report(d).structure;
}

// --- memoization -------------------------------------------------------------

std::optional<AbelianGroupStructure> StructureCache::find(i128 d) const {
    std::lock_guard lock(mu_);
    auto it = table_.find(d);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

void StructureCache::insert(i128 d, const AbelianGroupStructure& g) {
    std::lock_guard lock(mu_);
    table_.emplace(d, g);
}

AbelianGroupStructure StructureCache::get_or_compute(
    i128 d, const std::function<AbelianGroupStructure(i128)>& compute) {
    if (auto hit = find(d)) return *hit;
    auto g = compute(d);
    insert(d, g);
    return g;
}

std::vector<i128> StructureCache::keys() const {
    std::lock_guard lock(mu_);
    std::vector<i128> out;
    for (const auto& [d, g] : table_) out.push_back(d);
    return out;
}

std::size_t StructureCache::size() const {
    std::lock_guard lock(mu_);
    return table_.size();
}

}  // namespace quadrank::classgroup
