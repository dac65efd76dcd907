#include "quadrank/poly.hpp"

#include "quadrank/errors.hpp"

#include <sstream>

namespace quadrank::forms {

Polynomial::Polynomial(std::vector<mpq_class> coefficients) : coeffs_(std::move(coefficients)) {
    for (auto& c : coeffs_) c.canonicalize();
    trim();
}

Polynomial::Polynomial(std::initializer_list<long> coefficients) {
    for (long c : coefficients) coeffs_.emplace_back(c);
    trim();
}

Polynomial Polynomial::monomial(const mpq_class& c, std::size_t degree) {
    std::vector<mpq_class> v(degree + 1, 0);
    v[degree] = c;
    return Polynomial(std::move(v));
}

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const mpq_class& Polynomial::leading() const {
    require(!coeffs_.empty(), "leading coefficient of the zero polynomial");
    return coeffs_.back();
}

mpq_class Polynomial::operator()(const mpq_class& x) const {
    mpq_class acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    std::vector<mpq_class> d;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * static_cast<long>(i));
    return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
    if (is_zero()) return *this;
    return mpq_class(1 / leading()) * *this;
}

bool Polynomial::has_integer_coefficients() const {
    for (const auto& c : coeffs_) {
        if (c.get_den() != 1) return false;
    }
    return true;
}

Polynomial Polynomial::taylor_shift(const mpq_class& shift) const {
    // Horner with the linear polynomial (x + shift).
    Polynomial acc;
    Polynomial lin(std::vector<mpq_class>{shift, 1});
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * lin + Polynomial(std::vector<mpq_class>{*it});
    }
    return acc;
}

Polynomial Polynomial::scale_variable(const mpq_class& scale) const {
    std::vector<mpq_class> v = coeffs_;
    mpq_class p = 1;
    for (auto& c : v) {
        c *= p;
        p *= scale;
    }
    return Polynomial(std::move(v));
}

Polynomial Polynomial::operator-() const {
    std::vector<mpq_class> v = coeffs_;
    for (auto& c : v) c = -c;
    return Polynomial(std::move(v));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<mpq_class> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) v[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) v[i] += b.coeffs_[i];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpq_class> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(v));
}

Polynomial operator*(const mpq_class& s, const Polynomial& a) {
    std::vector<mpq_class> v = a.coeffs_;
    for (auto& c : v) c *= s;
    return Polynomial(std::move(v));
}

std::string Polynomial::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const mpq_class& c = coeffs_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        mpq_class mag = abs(c);
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (mag != 1 || i == 0) os << mag.get_str();
        if (i >= 1) os << var;
        if (i >= 2) os << '^' << i;
    }
    return os.str();
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    require(!b.is_zero(), "polynomial division by zero");
    std::vector<mpq_class> rem = a.coefficients();
    int db = b.degree();
    int da = a.degree();
    if (da < db) return {Polynomial(), a};
    std::vector<mpq_class> quot(static_cast<std::size_t>(da - db + 1), 0);
    const mpq_class& lb = b.leading();
    for (int i = da; i >= db; --i) {
        mpq_class q = rem[static_cast<std::size_t>(i)] / lb;
        quot[static_cast<std::size_t>(i - db)] = q;
        if (q == 0) continue;
        for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i - db + j)] -= q * b.coeff(static_cast<std::size_t>(j));
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

bool is_squarefree(const Polynomial& f) {
    if (f.is_constant()) return true;
    return gcd(f, f.derivative()).degree() == 0;
}

Polynomial parse_polynomial(const std::string& text) {
    std::vector<mpq_class> coeffs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t\"");
        auto e = item.find_last_not_of(" \t\"");
        if (b == std::string::npos) throw usage_error("empty coefficient in '" + text + "'");
        std::string tok = item.substr(b, e - b + 1);
        if (!tok.empty() && tok[0] == '+') tok.erase(0, 1);
        mpq_class q;
        if (tok.empty() || q.set_str(tok, 10) != 0 || q.get_den() == 0) throw usage_error("bad coefficient '" + tok + "'");
        q.canonicalize();
        coeffs.push_back(q);
    }
    if (coeffs.empty()) throw usage_error("empty coefficient list");
    return Polynomial(std::move(coeffs));
}

std::string format_coefficients(const Polynomial& f) {
    std::string out;
    for (std::size_t i = 0; i < f.coefficients().size(); ++i) {
        if (i) out += ',';
        out += f.coefficients()[i].get_str();
    }
    return out.empty() ? "0" : out;
}

SturmSequence::SturmSequence(const Polynomial& f) {
    require(!f.is_zero(), "Sturm sequence of the zero polynomial");
    chain_.push_back(f);
    Polynomial prev = f, cur = f.derivative();
    while (!cur.is_zero()) {
        chain_.push_back(cur);
        Polynomial r = divmod(prev, cur).second;
        prev = std::move(cur);
        cur = -r;
    }
}

int SturmSequence::sign_changes(const mpq_class& x) const {
    int changes = 0, last = 0;
    for (const auto& p : chain_) {
        int s = sgn(p(x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int SturmSequence::roots_in_open(const mpq_class& lo, const mpq_class& hi) const {
    if (lo >= hi) return 0;
    int count = sign_changes(lo) - sign_changes(hi);  // roots in (lo, hi]
    if (chain_.front()(hi) == 0) --count;
    return count;
}

int constant_sign_on(const Polynomial& f, const mpq_class& lo, const mpq_class& hi) {
    require(is_squarefree(f), "constant_sign_on: polynomial must be squarefree");
    SturmSequence s(f);
    if (s.roots_in_open(lo, hi) != 0) return 0;
    mpq_class mid = (lo + hi) / 2;
    return sgn(f(mid));
}

mpq_class resultant(const Polynomial& a, const Polynomial& b) {
    require(!a.is_zero() && !b.is_zero(), "resultant: zero polynomial");
    const int m = a.degree(), n = b.degree();
    if (n == 0) {
        mpq_class out = 1;
        for (int i = 0; i < m; ++i) out *= b.leading();
        return out;
    }
    if (m < n) {
        mpq_class r = resultant(b, a);
        return (m * n) % 2 ? mpq_class(-r) : r;
    }
    Polynomial r = divmod(a, b).second;
    if (r.is_zero()) return 0;
    const int k = r.degree();
    mpq_class out = resultant(b, r);
    for (int i = 0; i < m - k; ++i) out *= b.leading();
    return (m * n) % 2 ? mpq_class(-out) : out;
}

mpq_class discriminant(const Polynomial& f) {
    const int n = f.degree();
    require(n >= 1, "discriminant: degree must be positive");
    mpq_class r = resultant(f, f.derivative()) / f.leading();
    return (n * (n - 1) / 2) % 2 ? mpq_class(-r) : r;
}

}  // namespace quadrank::forms
