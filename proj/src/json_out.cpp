#include "mcd/json_out.hpp"

#include <cstdio>

namespace mcd {

namespace {

std::string format_number(const Json& j) {
    if (j.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
        return buf;
    }
    return j.dump();
}

void write(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += pad_in + Json(it.key()).dump() + ": ";
            write(it.value(), out, indent, depth + 1);
            out += (i + 1 < j.size()) ? ",\n" : "\n";
        }
        out += pad + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += pad_in;
            write(j[i], out, indent, depth + 1);
            out += (i + 1 < j.size()) ? ",\n" : "\n";
        }
        out += pad + "]";
    } else if (j.is_number()) {
        out += format_number(j);
    } else {
        out += j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    write(j, out, indent, 0);
    out += "\n";
    return out;
}

Json to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Json constants_json(const EllipticalConstants& c) {
    Json j;
    j["gamma"] = c.gamma;
    j["k"] = c.k;
    j["r"] = c.r;
    j["alpha"] = c.alpha;
    j["rho0"] = c.rho0;
    j["nu0"] = c.nu0;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["beta3"] = c.beta3;
    j["beta4"] = c.beta4;
    j["beta5"] = c.beta5;
    j["beta6"] = c.beta6;
    j["pi"] = c.pi;
    j["kappa1"] = c.kappa1;
    j["kappa2"] = c.kappa2;
    j["kappa3"] = c.kappa3;
    j["kappa4"] = c.kappa4;
    j["lambda1"] = c.lambda1;
    j["lambda2"] = c.lambda2;
    j["lambda3"] = c.lambda3;
    j["tau"] = c.tau;
    j["sigma1"] = c.sigma1;
    j["sigma2"] = c.sigma2;
    j["sigma_rho_sq"] = c.sigma_rho_sq;
    j["m2"] = c.m2;
    j["m4"] = c.m4;
    return j;
}

}  // namespace mcd
