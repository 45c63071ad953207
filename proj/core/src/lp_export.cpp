#include <cmath>
#include <cstdio>
#include <string>

#include "portalloc/linear_program.hpp"

namespace portalloc {
namespace {

std::string num(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string signed_term(double coef, const std::string& name) {
    std::string out = coef < 0 ? " - " : " + ";
    out += num(std::abs(coef));
    out += ' ';
    out += name;
    return out;
}

}  // namespace

std::string export_lp_text(const LinearProgram& lp) {
    std::string out = "obj: max";
    for (const auto& col : lp.columns()) {
        if (col.objective != 0.0) out += signed_term(col.objective, col.name);
    }
    out += '\n';
    for (const auto& row : lp.rows()) {
        out += row.name;
        out += ':';
        for (const auto& t : row.terms) out += signed_term(t.value, lp.column(t.column).name);
        switch (row.relation) {
            case Relation::LessEqual: out += " <= "; break;
            case Relation::Equal: out += " = "; break;
            case Relation::GreaterEqual: out += " >= "; break;
        }
        out += num(row.rhs);
        out += '\n';
    }
    for (const auto& col : lp.columns()) {
        out += "bound " + col.name + ": " + num(col.lower) + " <= " + col.name + " <= " + num(col.upper) + '\n';
    }
    return out;
}

}  // namespace portalloc
