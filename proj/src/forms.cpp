#include "quadrank/forms.hpp"

#include "quadrank/arith.hpp"
#include "quadrank/errors.hpp"

#include <sstream>

namespace quadrank::forms {

namespace {

// Binary forms with rational coefficients, same layout as BinaryForm.
using RForm = std::vector<mpq_class>;

RForm multiply(const RForm& p, const RForm& q) {
    RForm out(p.size() + q.size() - 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    }
    return out;
}

RForm power(const RForm& p, int e) {
    RForm out{1};
    for (int i = 0; i < e; ++i) out = multiply(out, p);
    return out;
}

mpz_class lcm_of_denominators(const std::vector<mpq_class>& v) {
    mpz_class den = 1;
    for (const auto& q : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    return den;
}

}  // namespace

BinaryForm::BinaryForm(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
    require(!coeffs_.empty(), "binary form needs at least one coefficient");
}

mpz_class BinaryForm::evaluate(const mpz_class& a, const mpz_class& b) const {
    std::size_t r = coeffs_.size() - 1;
    mpz_class acc = coeffs_[r], bp = 1;
    for (std::size_t i = r; i-- > 0;) {
        bp *= b;
        acc = acc * a + coeffs_[i] * bp;
    }
    return acc;
}

mpz_class BinaryForm::evaluate_horner_y(const mpz_class& a, const mpz_class& b) const {
    mpz_class acc = coeffs_[0], ap = 1;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        ap *= a;
        acc = acc * b + coeffs_[i] * ap;
    }
    return acc;
}

mpz_class evaluate_form(const BinaryForm& F, const mpz_class& a, const mpz_class& b) { return F.evaluate(a, b); }

Polynomial BinaryForm::dehomogenize() const {
    std::vector<mpq_class> v;
    for (const auto& c : coeffs_) v.emplace_back(c);
    return Polynomial(std::move(v));
}

int BinaryForm::y_multiplicity() const {
    int e = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend() && *it == 0; ++it) ++e;
    return e;
}

bool BinaryForm::has_kth_power_factor(unsigned k) const {
    require(k >= 2, "has_kth_power_factor: k must be at least 2");
    if (y_multiplicity() >= static_cast<int>(k)) return true;
    Polynomial g = dehomogenize();
    if (g.is_zero()) return true;
    Polynomial acc = g, der = g;
    for (unsigned i = 1; i < k; ++i) {
        der = der.derivative();
        acc = gcd(acc, der);
    }
    return acc.degree() > 0;
}

bool BinaryForm::is_squarefree() const { return !has_kth_power_factor(2); }

bool BinaryForm::is_power_of_linear() const {
    int r = degree();
    if (r <= 1) return true;
    int e = y_multiplicity();
    if (e == r + 1) return true;  // zero form
    if (e == r) return true;
    if (e > 0) return false;
    Polynomial g = dehomogenize();
    mpq_class rho = -g.coeff(static_cast<std::size_t>(r - 1)) / (g.leading() * r);
    Polynomial lin(std::vector<mpq_class>{-rho, 1});
    Polynomial p = Polynomial(std::vector<mpq_class>{g.leading()});
    for (int i = 0; i < r; ++i) p = p * lin;
    return p == g;
}

mpz_class BinaryForm::content() const {
    mpz_class g = 0;
    for (const auto& c : coeffs_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

std::string BinaryForm::to_string() const {
    std::ostringstream os;
    bool first = true;
    int r = degree();
    for (int i = r; i >= 0; --i) {
        const mpz_class& c = coeffs_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        mpz_class mag = abs(c);
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool mono = i > 0 || r - i > 0;
        if (mag != 1 || !mono) os << mag;
        if (i > 0) os << 'X' << (i > 1 ? "^" + std::to_string(i) : "");
        if (r - i > 0) os << 'Y' << (r - i > 1 ? "^" + std::to_string(r - i) : "");
    }
    return first ? "0" : os.str();
}

bool MobiusMap::is_identity() const { return b == 0 && c == 0 && a == d && a != 0; }

MobiusMap MobiusMap::inverse() const {
    require(determinant() != 0, "singular Mobius map");
    return MobiusMap{d, -b, -c, a};
}

MobiusMap MobiusMap::compose(const MobiusMap& o) const {
    return MobiusMap{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

bool MobiusMap::same_map(const MobiusMap& o) const {
    return a * o.b == b * o.a && a * o.c == c * o.a && a * o.d == d * o.a && b * o.c == c * o.b &&
           b * o.d == d * o.b && c * o.d == d * o.c;
}

std::optional<mpq_class> MobiusMap::apply(const mpq_class& t) const {
    mpq_class den = c * t + d;
    if (den == 0) return std::nullopt;
    mpq_class r = (a * t + b) / den;
    r.canonicalize();
    return r;
}

std::optional<mpq_class> SquareCertificate::evaluate(const mpq_class& x, const mpq_class& y) const {
    mpq_class l = lx * x + ly * y;
    if (exponent < 0 && l == 0) return std::nullopt;
    mpq_class v = scale;
    mpq_class base = exponent < 0 ? mpq_class(1 / l) : l;
    for (int i = 0; i < std::abs(exponent); ++i) v *= base;
    return v;
}

std::string SquareCertificate::to_string() const {
    std::ostringstream os;
    os << scale.get_str();
    if (exponent != 0) {
        BinaryForm L({ly, lx});
        os << " * (" << L.to_string() << ")^" << exponent;
    }
    return os.str();
}

HomogenizedSplit homogenize_split(const Polynomial& f, const MobiusMap& tau) {
    require(!f.is_constant(), "homogenize_split: f must be nonconstant");
    require(is_squarefree(f), "homogenize_split: f must be squarefree");
    require(tau.determinant() != 0, "homogenize_split: tau must be invertible");

    const int n = f.degree();
    const RForm num{mpq_class(tau.b), mpq_class(tau.a)};  // a X + b Y
    const RForm den{mpq_class(tau.d), mpq_class(tau.c)};  // c X + d Y

    // G = L^n f(M/L) as a binary form of degree n.
    RForm G(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i <= n; ++i) {
        RForm term = multiply(power(num, i), power(den, n - i));
        for (std::size_t j = 0; j < term.size(); ++j) G[j] += f.coeff(static_cast<std::size_t>(i)) * term[j];
    }
    int k = n / 2;
    if (n % 2) {
        G = multiply(G, den);
        k = (n + 1) / 2;
    }

    // Split off the rational content; only its square part moves into R.
    mpz_class lcd = lcm_of_denominators(G);
    std::vector<mpz_class> ints;
    mpz_class g = 0;
    for (const auto& q : G) {
        mpq_class vq = q * lcd;
        mpz_class v = vq.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        ints.push_back(v);
    }
    for (auto& v : ints) v /= g;
    mpq_class content(g, lcd);
    content.canonicalize();
    const mpz_class p = content.get_num(), q = content.get_den();
    auto core = arith::kfree_part(p * q, 2);
    for (auto& v : ints) v *= core.t;

    HomogenizedSplit out{BinaryForm(std::move(ints)), SquareCertificate{}};
    out.R.scale = mpq_class(core.z, q);
    out.R.scale.canonicalize();
    out.R.lx = tau.c;
    out.R.ly = tau.d;
    out.R.exponent = -k;

    if (!out.F.is_squarefree() || out.F.degree() % 2 != 0 || out.F.degree() < 2) {
        throw std::logic_error("homogenize_split produced a form violating its contract: " + out.F.to_string());
    }

    // Spot-check the identity F * R^2 = f o tau.
    int checked = 0;
    for (long j = 0; checked <= out.F.degree() && j < 1000; ++j) {
        mpq_class x(j * 3 - 7), y(2 * j + 1);
        auto t = tau.apply(x / y);
        auto r = out.R.evaluate(x, y);
        if (!t || !r) continue;
        mpq_class lhs = mpq_class(out.F.evaluate(x.get_num(), y.get_num())) * *r * *r;
        if (lhs != f(*t)) throw std::logic_error("homogenize_split certificate failed");
        ++checked;
    }
    return out;
}

namespace {

// Smallest s > 0 with den | s^2.
mpz_class square_cover(const mpz_class& den) {
    if (den == 1) return 1;
    mpz_class s = 1;
    for (const auto& [p, e] : arith::factor(den).factors) {
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), (e + 1) / 2);
        s *= pe;
    }
    return s;
}

}  // namespace

OddModel odd_model(const Polynomial& f, const mpq_class& root) {
    require(f.degree() >= 2 && f.degree() % 2 == 0, "odd_model: f must have even degree >= 2");
    require(f(root) == 0, "odd_model: supplied value is not a root of f");
    require(is_squarefree(f), "odd_model: f must be squarefree");

    OddModel m;
    m.source = f;
    m.root = root;
    m.scale = square_cover(lcm_of_denominators(f.coefficients()));
    const Polynomial fi = mpq_class(m.scale * m.scale) * f;

    const int n = f.degree();
    const int d = n - 1;
    m.genus = (d - 1) / 2;

    // fi(root + e) = sum a_k e^k, a_0 = 0; u^n fi(root + 1/u) = sum_j a_{n-j} u^j.
    const Polynomial shifted = fi.taylor_shift(root);
    m.lead = shifted.coeff(1);
    std::vector<mpq_class> h2(static_cast<std::size_t>(d) + 1);
    mpq_class lpow = 1;  // lead^(d-1-j), built from j = d-1 downwards
    h2[static_cast<std::size_t>(d)] = 1;
    for (int j = d - 1; j >= 0; --j) {
        h2[static_cast<std::size_t>(j)] = shifted.coeff(static_cast<std::size_t>(n - j)) * lpow;
        lpow *= m.lead;
    }
    m.lambda = lcm_of_denominators(h2);
    mpq_class l2 = m.lambda * m.lambda, pw = 1;
    for (int j = d; j >= 0; --j) {
        h2[static_cast<std::size_t>(j)] *= pw;
        pw *= l2;
    }
    m.h = Polynomial(std::move(h2));
    if (!m.verify()) throw std::logic_error("odd_model certificate failed");
    return m;
}

mpq_class OddModel::to_model(const mpq_class& x) const {
    if (x == root) throw domain_error("odd_model: the moved root has no finite image");
    mpq_class w = mpq_class(lambda * lambda) * lead / (x - root);
    w.canonicalize();
    return w;
}

mpq_class OddModel::from_model(const mpq_class& w) const {
    if (w == 0) throw domain_error("odd_model: w = 0 corresponds to x = infinity");
    mpq_class x = root + mpq_class(lambda * lambda) * lead / w;
    x.canonicalize();
    return x;
}

mpq_class OddModel::square_factor(const mpq_class& x) const {
    // scale^2 * lambda^(2d) * lead^(d-1) * (x - root)^(-n)
    const int n = source.degree(), d = n - 1;
    mpq_class u = 1 / (x - root);
    mpq_class v = mpq_class(scale * scale);
    for (int i = 0; i < 2 * d; ++i) v *= lambda;
    for (int i = 0; i < d - 1; ++i) v *= lead;
    for (int i = 0; i < n; ++i) v *= u;
    return v;
}

bool OddModel::verify() const {
    const int n = source.degree();
    if (h.degree() != n - 1 || h.degree() % 2 == 0) return false;
    if (h.leading() != 1 || !h.has_integer_coefficients() || !is_squarefree(h)) return false;
    // Both sides are polynomials of degree <= n in u = 1/(x - root).
    int checked = 0;
    for (long j = 1; checked < n + 2; ++j) {
        mpq_class step(j, 3);
        step.canonicalize();
        mpq_class x = root + step * (j % 2 ? 1 : -1);
        if (source(x) == 0) continue;
        if (h(to_model(x)) != square_factor(x) * source(x)) return false;
        ++checked;
    }
    return true;
}

}  // namespace quadrank::forms
