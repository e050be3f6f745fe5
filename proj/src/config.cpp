#include "krdoa/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace krdoa {

using nlohmann::json;

std::string to_string(Method m) {
    switch (m) {
        case Method::RealKr: return "real-kr";
        case Method::ComplexKr: return "complex-kr";
    }
    throw std::invalid_argument("unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "real-kr") return Method::RealKr;
    if (s == "complex-kr") return Method::ComplexKr;
    throw std::invalid_argument("unknown method '" + s + "' (expected real-kr or complex-kr)");
}

ArrayGeometry GeometryConfig::build() const {
    ArrayGeometry g;
    if (kind == "ula") {
        g = make_ula(n, spacing);
    } else if (kind == "nested" || kind == "nested-proposed") {
        g = make_nested_proposed(n1, n2, spacing);
    } else if (kind == "pal" || kind == "nested-pal") {
        g = make_nested_pal(n1, n2, spacing);
    } else if (kind == "custom") {
        g = make_custom(positions, spacing, label.empty() ? "custom" : label);
    } else {
        throw std::invalid_argument("unknown geometry kind '" + kind +
                                    "' (expected ula, nested, pal or custom)");
    }
    if (!label.empty()) g.label = label;
    return g;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    GeometryConfig ula;
    ula.kind = "ula";
    ula.n = 6;
    GeometryConfig nested;
    nested.kind = "nested";
    nested.n1 = 3;
    nested.n2 = 3;
    cfg.geometries = {ula, nested};
    cfg.methods = {Method::RealKr, Method::ComplexKr};
    cfg.doas_deg = {-50.0, -40.0, -15.0, 0.0, 30.0, 35.0, 40.0};
    cfg.snr_db = 0.0;
    cfg.snr_sweep_db = {-10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0};
    cfg.rmse_truth_deg = 15.0;
    cfg.snapshots = 20000;
    cfg.frame_length = 400;
    cfg.trials = 200;
    cfg.seed = 1;
    cfg.grid = GridSpec{-90.0, 90.0, 0.05};
    cfg.bench_repeats = 100;
    cfg.out_dir = "out";
    return cfg;
}

namespace {

GeometryConfig geometry_from_json(const json& j) {
    GeometryConfig gc;
    gc.kind = j.value("kind", std::string("ula"));
    gc.n = j.value("n", 0);
    gc.n1 = j.value("n1", 0);
    gc.n2 = j.value("n2", 0);
    gc.spacing = j.value("spacing", 0.5);
    gc.label = j.value("label", std::string());
    if (j.contains("positions")) gc.positions = j.at("positions").get<std::vector<int>>();
    return gc;
}

json geometry_to_json(const GeometryConfig& gc) {
    json j;
    j["kind"] = gc.kind;
    if (gc.kind == "ula") j["n"] = gc.n;
    if (gc.kind == "nested" || gc.kind == "nested-proposed" || gc.kind == "pal" ||
        gc.kind == "nested-pal") {
        j["n1"] = gc.n1;
        j["n2"] = gc.n2;
    }
    if (gc.kind == "custom") j["positions"] = gc.positions;
    j["spacing"] = gc.spacing;
    if (!gc.label.empty()) j["label"] = gc.label;
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg = defaults();
    try {
        if (j.contains("geometries")) {
            cfg.geometries.clear();
            for (const auto& gj : j.at("geometries")) cfg.geometries.push_back(geometry_from_json(gj));
        }
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& mj : j.at("methods"))
                cfg.methods.push_back(method_from_string(mj.get<std::string>()));
        }
        if (j.contains("doas_deg")) cfg.doas_deg = j.at("doas_deg").get<std::vector<double>>();
        cfg.snr_db = j.value("snr_db", cfg.snr_db);
        if (j.contains("snr_sweep_db"))
            cfg.snr_sweep_db = j.at("snr_sweep_db").get<std::vector<double>>();
        cfg.rmse_truth_deg = j.value("rmse_truth_deg", cfg.rmse_truth_deg);
        cfg.snapshots = j.value("snapshots", cfg.snapshots);
        cfg.frame_length = j.value("frame_length", cfg.frame_length);
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.grid.min_deg = j.value("grid_min_deg", cfg.grid.min_deg);
        cfg.grid.max_deg = j.value("grid_max_deg", cfg.grid.max_deg);
        cfg.grid.step_deg = j.value("grid_step_deg", cfg.grid.step_deg);
        cfg.bench_repeats = j.value("bench_repeats", cfg.bench_repeats);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["geometries"] = json::array();
    for (const auto& gc : geometries) j["geometries"].push_back(geometry_to_json(gc));
    j["methods"] = json::array();
    for (Method m : methods) j["methods"].push_back(to_string(m));
    j["doas_deg"] = doas_deg;
    j["snr_db"] = snr_db;
    j["snr_sweep_db"] = snr_sweep_db;
    j["rmse_truth_deg"] = rmse_truth_deg;
    j["snapshots"] = snapshots;
    j["frame_length"] = frame_length;
    j["trials"] = trials;
    j["seed"] = seed;
    j["grid_min_deg"] = grid.min_deg;
    j["grid_max_deg"] = grid.max_deg;
    j["grid_step_deg"] = grid.step_deg;
    j["bench_repeats"] = bench_repeats;
    j["out_dir"] = out_dir;
    return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
    if (geometries.empty()) throw std::invalid_argument("config: no geometries");
    std::set<std::string> labels;
    for (const auto& gc : geometries) {
        const ArrayGeometry g = gc.build();  // throws on bad kind/stages
        if (!labels.insert(g.label).second)
            throw std::invalid_argument("config: duplicate geometry label '" + g.label + "'");
    }
    if (methods.empty()) throw std::invalid_argument("config: no methods");
    if (doas_deg.empty()) throw std::invalid_argument("config: no source angles");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (snapshots < 1 || frame_length < 1 || snapshots % frame_length != 0)
        throw std::invalid_argument("config: snapshots must be a positive multiple of frame_length");
    if (snr_sweep_db.empty()) throw std::invalid_argument("config: empty snr sweep");
    if (!(rmse_truth_deg >= -90.0 && rmse_truth_deg <= 90.0))
        throw std::invalid_argument("config: rmse_truth_deg outside [-90, 90]");
    if (bench_repeats < 30)
        throw std::invalid_argument("config: bench_repeats must be >= 30 for stable medians");
    grid.validate();
}

}  // namespace krdoa
