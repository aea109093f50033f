#pragma once

#include <sstream>
#include <string>

#include "dulac/series.hpp"

namespace dulac {

/// Variable names used when rendering series. The monomial algebra is
/// shared between the phase variable x and the neighborhood size eps;
/// renaming is presentation only.
struct VarNames {
    std::string x = "x";
    std::string l = "l";
    std::string l2 = "l2";
    static VarNames eps() { return {"eps", "l", "l2"}; }
};

/// Canonical text form: `c * x^(p/q) * l^(p/q) * l2^(p/q) + ...`,
/// terms in increasing lex order, unit exponents elided.
inline std::string to_text(const TSeries& s, const VarNames& v = {}) {
    if (s.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : s.terms()) {
        if (!first) os << " + ";
        first = false;
        std::string cs = c.str();
        bool wrap = cs.find(' ') != std::string::npos;
        os << (wrap ? "(" + cs + ")" : cs);
        auto emit = [&](const std::string& name, const Rat& e) {
            if (e == 0) return;
            os << " * " << name;
            if (e != 1) os << "^(" << rat_str(e) << ")";
        };
        emit(v.x, m.a);
        emit(v.l, m.g1);
        emit(v.l2, m.g2);
    }
    return os.str();
}

/// CSV rows `a,g1,g2,coeff_num,coeff_den` (exact mode; symbolic values are
/// rendered canonically in the coeff_num column with coeff_den = 1) or
/// `a,g1,g2,coeff_float` (float mode), one row per stored term.
inline std::string to_csv(const TSeries& s) {
    std::ostringstream os;
    if (s.mode() == Mode::exact) {
        os << "a,g1,g2,coeff_num,coeff_den\n";
        for (const auto& [m, c] : s.terms()) {
            os << rat_str(m.a) << "," << rat_str(m.g1) << "," << rat_str(m.g2) << ",";
            if (c.is_rational()) {
                Rat q = c.as_rational();
                os << numerator(q).str() << "," << denominator(q).str();
            } else {
                os << '"' << c.str() << '"' << ",1";
            }
            os << "\n";
        }
    } else {
        os << "a,g1,g2,coeff_float\n";
        for (const auto& [m, c] : s.terms())
            os << rat_str(m.a) << "," << rat_str(m.g1) << "," << rat_str(m.g2) << ","
               << c.float_value().str() << "\n";
    }
    return os.str();
}

}  // namespace dulac
