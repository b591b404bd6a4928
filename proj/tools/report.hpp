#ifndef CRNLYAP_TOOLS_REPORT_HPP
#define CRNLYAP_TOOLS_REPORT_HPP

// JSON builders for crn-lyap reports. Keys keep insertion order and no timing
// data is emitted, so identical runs produce identical bytes.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "crnlyap/crnlyap.hpp"

namespace crnlyap::report {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Non-finite doubles become null (JSON has no inf/nan).
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json vec(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline Json complex_json(const Complex& c, const std::vector<std::string>& names) {
    Json o = Json::object();
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0) o[names[j]] = c[j];
    return o;
}

/// {species: [...], reactions: [{reactant: {S: c}, product: {...}, k}]}
inline Json network_json(const Network& net) {
    Json o;
    o["species"] = net.species_names();
    Json rs = Json::array();
    for (const auto& r : net.reactions()) {
        Json j;
        j["reactant"] = complex_json(r.reactant, net.species_names());
        j["product"] = complex_json(r.product, net.species_names());
        j["k"] = r.rate_const;
        rs.push_back(std::move(j));
    }
    o["reactions"] = std::move(rs);
    return o;
}

inline Json structure_json(const StoichStructure& s) {
    Json o;
    o["dim"] = s.dim;
    Json sb = Json::array(), ob = Json::array();
    for (const auto& v : s.s_basis) sb.push_back(vec(v));
    for (const auto& v : s.orth_basis) ob.push_back(vec(v));
    o["s_basis"] = std::move(sb);
    o["orth_basis"] = std::move(ob);
    o["complexes"] = s.num_complexes;
    o["linkage_classes"] = s.linkage_classes;
    o["deficiency"] = s.deficiency;
    return o;
}

inline Json equilibrium_json(const EquilibriumResult& e) {
    Json o;
    o["x_star"] = vec(e.x_star);
    o["residual_norm"] = num(e.residual_norm);
    o["newton_iters"] = e.newton_iters;
    o["complex_balanced"] = e.complex_balanced;
    o["imbalances"] = vec(e.imbalances);
    return o;
}

inline Json decomposition_json(const Decomposition& dec, const Network& parent) {
    Json parts = Json::array();
    for (const auto& p : dec.parts) {
        Json j;
        std::vector<std::string> names;
        for (auto idx : p.species) names.push_back(parent.species_names()[idx]);
        j["species"] = names;
        j["reactions"] = p.reactions;
        j["classification"] = to_string(p.classification);
        parts.push_back(std::move(j));
    }
    return parts;
}

inline Json margin_json(const MarginEntry& m, const Network& parent) {
    Json o;
    std::vector<std::string> names;
    for (auto idx : m.species) names.push_back(parent.species_names()[idx]);
    o["species"] = names;
    o["margin"] = num(m.margin.margin);
    o["eigenvalues"] = Json::array({num(m.margin.eigenvalues[0]), num(m.margin.eigenvalues[1])});
    return o;
}

inline Json lyapunov_json(const LyapunovFn& fn, const Network& net) {
    Json o;
    o["method"] = method_name(fn);
    o["x_star"] = vec(equilibrium_of(fn));
    o["boundary_complex_set"] = boundary_policy(fn) == BoundaryPolicy::empty ? "empty" : "naive";
    if (const auto* s = std::get_if<ScaledGibbsFn>(&fn)) o["factor"] = s->factor;
    if (const auto* c = std::get_if<CompositeFn>(&fn)) {
        Json parts = Json::array();
        for (const auto& p : c->parts) {
            Json j;
            std::vector<std::string> names;
            for (auto idx : p.species) names.push_back(net.species_names()[idx]);
            j["species"] = names;
            j["classification"] = to_string(p.classification);
            parts.push_back(std::move(j));
        }
        o["parts"] = std::move(parts);
    }
    if (const auto* d = std::get_if<Dim1LyapunovFn>(&fn)) {
        o["w"] = d->geometry.w;
        o["m"] = d->geometry.m;
        Json faces = Json::array();
        for (const auto& f : d->faces) {
            Json j;
            j["xbar"] = vec(f.xbar);
            j["naive_set_empty"] = f.naive_set_empty;
            j["has_reactant"] = f.has_reactant;
            j["has_resultant"] = f.has_resultant;
            j["assumption_holds"] = f.assumption_holds;
            faces.push_back(std::move(j));
        }
        o["faces"] = std::move(faces);
    }
    Json margins = Json::array();
    for (const auto& m : stability_margins(fn)) margins.push_back(margin_json(m, net));
    o["stability_margins"] = std::move(margins);
    o["warnings"] = construction_warnings(fn);
    return o;
}

inline Json verification_json(const VerificationReport& r, const Network& net) {
    Json o;
    o["method"] = r.method;
    o["verdict"] = to_string(r.verdict);
    o["reasons"] = r.reasons;
    o["warnings"] = r.warnings;
    o["x_star"] = vec(r.x_star);
    Json tol;
    tol["samples"] = r.options.samples;
    tol["seed"] = r.options.seed;
    tol["residual"] = r.options.residual_tol;
    tol["boundary"] = r.options.boundary_tol;
    tol["dissipation"] = r.options.dissipation_tol;
    o["options"] = std::move(tol);

    Json res;
    res["passed"] = r.residual_passed;
    res["evaluated"] = r.residual.evaluated;
    res["evaluation_errors"] = r.residual.evaluation_errors;
    res["max_abs"] = num(r.residual.max);
    res["mean_abs"] = num(r.residual.mean_abs);
    res["worst_x"] = vec(r.residual.worst_x);
    o["residual"] = std::move(res);

    Json dis;
    dis["passed"] = r.dissipation_passed;
    dis["max"] = num(r.dissipation.max);
    dis["mean_abs"] = num(r.dissipation.mean_abs);
    dis["worst_x"] = vec(r.dissipation.worst_x);
    dis["at_equilibrium"] = num(r.dissipation_at_equilibrium);
    dis["equality_case_flags"] = r.equality_case_flags;
    o["dissipation"] = std::move(dis);

    Json faces = Json::array();
    for (const auto& f : r.faces) {
        Json j;
        j["xbar"] = vec(f.xbar);
        std::vector<std::string> zero;
        for (auto z : f.zero_set) zero.push_back(net.species_names()[z]);
        j["zero_species"] = zero;
        Json cs = Json::array();
        for (const auto& c : f.complexes) cs.push_back(complex_json(c, net.species_names()));
        j["complexes"] = std::move(cs);
        j["limit"] = num(f.limit.limit);
        j["order"] = num(f.limit.order);
        j["samples"] = vec(f.limit.samples);
        j["determinate"] = f.limit.determinate;
        j["trivially_zero"] = f.limit.trivially_zero;
        j["passed"] = f.passed;
        if (!f.error.empty()) j["error"] = f.error;
        faces.push_back(std::move(j));
    }
    Json bnd;
    bnd["passed"] = r.boundary_passed;
    bnd["faces"] = std::move(faces);
    o["boundary"] = std::move(bnd);

    Json st;
    st["passed"] = r.stability_passed;
    Json margins = Json::array();
    for (const auto& m : r.margins) margins.push_back(margin_json(m, net));
    st["margins"] = std::move(margins);
    o["stability"] = std::move(st);
    return o;
}

}  // namespace crnlyap::report

#endif  // CRNLYAP_TOOLS_REPORT_HPP
