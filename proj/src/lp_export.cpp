#include "gridsched/lp_export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridsched {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void append_term(std::ostringstream& os, double coeff, const std::string& name,
                 bool& first) {
    if (coeff == 0.0) return;
    if (first) {
        if (coeff < 0.0) os << "- ";
        first = false;
    } else {
        os << (coeff < 0.0 ? " - " : " + ");
    }
    double mag = std::abs(coeff);
    if (mag != 1.0) os << num(mag) << ' ';
    os << name;
}

}  // namespace

std::string to_lp_format(const LinearProgram& lp) {
    std::ostringstream os;
    os << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < lp.num_variables(); ++j) {
        if (lp.objective[j] == 0.0) continue;
        os << ' ';
        append_term(os, lp.objective[j], lp.variable_name(j), first);
    }
    if (first) os << " 0 " << lp.variable_name(0);
    os << "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        os << ' ' << lp.row_name(i) << ':';
        bool row_first = true;
        for (const auto& e : lp.rows[i].entries) {
            os << ' ';
            append_term(os, e.value, lp.variable_name(e.column), row_first);
        }
        if (row_first) os << " 0 " << lp.variable_name(0);
        switch (lp.rows[i].sense) {
            case RowSense::LessEqual: os << " <= "; break;
            case RowSense::Equal: os << " = "; break;
            case RowSense::GreaterEqual: os << " >= "; break;
        }
        os << num(lp.rows[i].rhs) << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_variables(); ++j) {
        double lo = lp.lower[j], hi = lp.upper[j];
        const std::string name = lp.variable_name(j);
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            os << ' ' << name << " free\n";
        } else if (lo == hi) {
            os << ' ' << name << " = " << num(lo) << '\n';
        } else {
            os << ' ';
            if (std::isfinite(lo)) os << num(lo) << " <= ";
            else os << "-inf <= ";
            os << name;
            if (std::isfinite(hi)) os << " <= " << num(hi);
            os << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

void export_lp(const LinearProgram& lp, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << to_lp_format(lp);
}

}  // namespace gridsched
