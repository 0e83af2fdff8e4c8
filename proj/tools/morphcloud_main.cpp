#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morphcloud/biometrics.hpp"
#include "morphcloud/cleanup.hpp"
#include "morphcloud/cloud.hpp"
#include "morphcloud/csv.hpp"
#include "morphcloud/errors.hpp"
#include "morphcloud/holefill.hpp"
#include "morphcloud/landmarks.hpp"
#include "morphcloud/mad.hpp"
#include "morphcloud/miniball.hpp"
#include "morphcloud/morph.hpp"
#include "morphcloud/ply_io.hpp"
#include "morphcloud/png_io.hpp"
#include "morphcloud/project.hpp"
#include "morphcloud/quality.hpp"
#include "morphcloud/view.hpp"

namespace {

using namespace morphcloud;
using nlohmann::json;

constexpr const char* kToolVersion = "1.0.0";
constexpr const char* kManifestFormat = "morphcloud-manifest-v1";
constexpr const char* kReportFormat = "morphcloud-report-v1";

// Re-throws module errors with the pipeline stage prepended, so failures read
// "[landmarks] MissingFile: cannot open 'x.csv'".
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("[") + name + "] " + e.what());
    }
}

std::string double_repr(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Vec3d parse_vec3(const std::string& s) {
    std::vector<std::string> cells = split_csv_line(s);
    if (cells.size() != 3)
        throw Error(Errc::InvalidArgument, "offset '" + s + "' must be dx,dy,dz");
    double v[3];
    for (int i = 0; i < 3; ++i) {
        const char* begin = cells[i].c_str();
        char* end = nullptr;
        v[i] = std::strtod(begin, &end);
        if (end != begin + cells[i].size() || cells[i].empty())
            throw Error(Errc::InvalidArgument, "offset component '" + cells[i] + "' is not a number");
    }
    return {v[0], v[1], v[2]};
}

json vec3_json(const Vec3d& v) { return json::array({v.x, v.y, v.z}); }

void write_json_file(const json& j, const std::string& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, std::string("cannot write ") + what + " '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw Error(Errc::IoError, std::string("short write to ") + what + " '" + path + "'");
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::MissingFile, std::string("cannot open ") + what + " '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument,
                    std::string(what) + " '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

void write_manifest(const std::string& path, const std::string& command, const json& params) {
    json m;
    m["format"] = kManifestFormat;
    m["tool_version"] = kToolVersion;
    m["command"] = command;
    m["parameters"] = params;
    write_json_file(m, path, "manifest");
}

json manifest_params(const std::string& path, const std::string& command) {
    json m = load_json_file(path, "manifest");
    if (!m.contains("command") || m["command"] != command)
        throw Error(Errc::InvalidArgument, "manifest '" + path + "' does not describe a '" +
                                               command + "' run");
    if (!m.contains("parameters"))
        throw Error(Errc::InvalidArgument, "manifest '" + path + "' has no parameters object");
    return m["parameters"];
}

template <typename T>
void from_manifest(const json& p, const char* key, T& out) {
    try {
        if (p.contains(key)) p.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("manifest key '") + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------- view flags

struct ViewOptions {
    int width = 512, height = 512;
    double scale = 220.0;
    double depth_near = -2.0, depth_far = 2.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--width", width, "Raster width in pixels")->capture_default_str();
        cmd->add_option("--height", height, "Raster height in pixels")->capture_default_str();
        cmd->add_option("--view-scale", scale, "Pixels per world unit")->capture_default_str();
        cmd->add_option("--depth-near", depth_near, "Near clip plane (world z)")
            ->capture_default_str();
        cmd->add_option("--depth-far", depth_far, "Far clip plane (world z)")
            ->capture_default_str();
    }

    CanonicalView view() const {
        CanonicalView v = CanonicalView::centered(width, height, scale);
        v.depth_near = depth_near;
        v.depth_far = depth_far;
        return v;
    }

    json to_json() const {
        CanonicalView v = view();
        return {{"width", v.width},   {"height", v.height},         {"scale", v.scale},
                {"cx", v.cx},         {"cy", v.cy},                 {"depth_near", v.depth_near},
                {"depth_far", v.depth_far}};
    }

    void apply_manifest(const json& p) {
        if (!p.contains("view")) return;
        const json& v = p["view"];
        from_manifest(v, "width", width);
        from_manifest(v, "height", height);
        from_manifest(v, "scale", scale);
        from_manifest(v, "depth_near", depth_near);
        from_manifest(v, "depth_far", depth_far);
    }
};

// ------------------------------------------------------------- holefill flags

struct HoleFillOptions {
    std::vector<std::string> offset_strings; // empty = derived from cloud radius
    int inpaint_radius = 5;
    uint64_t ransac_seed = 7;
    bool exclude_canonical = false;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--offset", offset_strings,
                        "View translation dx,dy,dz; repeatable. Default: 7 offsets "
                        "derived from the cloud radius");
        cmd->add_option("--inpaint-radius", inpaint_radius, "Inpainting neighborhood radius")
            ->capture_default_str();
        cmd->add_option("--seed", ransac_seed, "Registration RANSAC seed")->capture_default_str();
        cmd->add_flag("--exclude-canonical", exclude_canonical,
                      "Drop the canonical view from the per-pixel average");
    }

    HoleFillParams params(const std::string& debug_dir) const {
        HoleFillParams p;
        for (const auto& s : offset_strings) p.offsets.push_back(parse_vec3(s));
        p.inpaint_radius = inpaint_radius;
        p.ransac_seed = ransac_seed;
        p.exclude_canonical = exclude_canonical;
        p.debug_dir = debug_dir;
        return p;
    }

    json to_json() const {
        json offs = json::array();
        for (const auto& s : offset_strings) offs.push_back(vec3_json(parse_vec3(s)));
        return {{"offsets", offs},
                {"inpaint_radius", inpaint_radius},
                {"ransac_seed", ransac_seed},
                {"exclude_canonical", exclude_canonical}};
    }

    void apply_manifest(const json& p) {
        if (!p.contains("holefill")) return;
        const json& h = p["holefill"];
        from_manifest(h, "inpaint_radius", inpaint_radius);
        from_manifest(h, "ransac_seed", ransac_seed);
        from_manifest(h, "exclude_canonical", exclude_canonical);
        if (h.contains("offsets")) {
            offset_strings.clear();
            for (const auto& o : h["offsets"]) {
                if (!o.is_array() || o.size() != 3)
                    throw Error(Errc::InvalidArgument, "manifest offsets must be [dx,dy,dz]");
                offset_strings.push_back(double_repr(o[0].get<double>()) + "," +
                                         double_repr(o[1].get<double>()) + "," +
                                         double_repr(o[2].get<double>()));
            }
        }
    }
};

void dump_maps(const ViewMaps& maps, const CanonicalView& view, const std::string& dir,
               const std::string& stem) {
    write_png_rgb(maps.color, dir + "/" + stem + "_color.png");
    write_png_depth(maps.depth, view.depth_near, view.depth_far, dir + "/" + stem + "_depth.png");
    write_png_mask(maps.valid, dir + "/" + stem + "_valid.png");
}

std::string default_manifest_path(const std::string& manifest, const std::string& primary) {
    return manifest.empty() ? primary + ".manifest.json" : manifest;
}

// ------------------------------------------------------------------- cmd_morph

struct MorphOptions {
    std::string input1, input2, landmarks1, landmarks2, output;
    std::string manifest, from_manifest_path, debug_dir;
    double alpha = 0.5;
    double target_radius = 1.0;
    double keep_fraction = 0.95;
    ViewOptions view;
    HoleFillOptions holefill;
};

void setup_morph(CLI::App& app, MorphOptions& o) {
    CLI::App* cmd = app.add_subcommand(
        "morph", "Generate a 3D face morph from two colored point clouds");
    cmd->add_option("-a,--input1", o.input1, "First subject PLY");
    cmd->add_option("-b,--input2", o.input2, "Second subject PLY");
    cmd->add_option("--landmarks1", o.landmarks1, "68-landmark CSV for the first subject");
    cmd->add_option("--landmarks2", o.landmarks2, "68-landmark CSV for the second subject");
    cmd->add_option("-o,--output", o.output, "Morphed cloud PLY");
    cmd->add_option("--alpha", o.alpha, "Blend weight on subject 1")->capture_default_str();
    cmd->add_option("--target-radius", o.target_radius,
                    "Radius both clouds are normalized to")
        ->capture_default_str();
    cmd->add_option("--keep-fraction", o.keep_fraction,
                    "Cleanup keeps points within this fraction of the bounding radius")
        ->capture_default_str();
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <output>.manifest.json)");
    cmd->add_option("--from-manifest", o.from_manifest_path,
                    "Load parameters from a previous run's manifest; flags win");
    cmd->add_option("--debug-dir", o.debug_dir, "Dump all intermediate rasters as PNG here");
    o.view.add_flags(cmd);
    o.holefill.add_flags(cmd);
}

void apply_morph_manifest(MorphOptions& o) {
    json p = manifest_params(o.from_manifest_path, "morph");
    from_manifest(p, "input1", o.input1);
    from_manifest(p, "input2", o.input2);
    from_manifest(p, "landmarks1", o.landmarks1);
    from_manifest(p, "landmarks2", o.landmarks2);
    from_manifest(p, "output", o.output);
    from_manifest(p, "alpha", o.alpha);
    from_manifest(p, "target_radius", o.target_radius);
    from_manifest(p, "keep_fraction", o.keep_fraction);
    from_manifest(p, "debug_dir", o.debug_dir);
    o.view.apply_manifest(p);
    o.holefill.apply_manifest(p);
}

void require_option(const std::string& value, const char* flag) {
    if (value.empty())
        throw Error(Errc::InvalidArgument, std::string(flag) + " is required");
}

int run_morph(const MorphOptions& o) {
    require_option(o.input1, "--input1");
    require_option(o.input2, "--input2");
    require_option(o.landmarks1, "--landmarks1");
    require_option(o.landmarks2, "--landmarks2");
    require_option(o.output, "--output");
    CanonicalView view = o.view.view();
    if (!o.debug_dir.empty()) std::filesystem::create_directories(o.debug_dir);

    ColoredPointCloud pc1 = stage("load", [&] { return load_ply(o.input1); });
    ColoredPointCloud pc2 = stage("load", [&] { return load_ply(o.input2); });

    ColoredPointCloud n1 = stage("normalize", [&] {
        return center_and_scale(pc1, min_enclosing_sphere(pc1), o.target_radius);
    });
    ColoredPointCloud n2 = stage("normalize", [&] {
        return center_and_scale(pc2, min_enclosing_sphere(pc2), o.target_radius);
    });

    LandmarkSet lm1 = stage("landmarks", [&] { return load_landmarks(o.landmarks1, view); });
    LandmarkSet lm2 = stage("landmarks", [&] { return load_landmarks(o.landmarks2, view); });

    MorphIntermediates inter;
    ColoredPointCloud morph = stage("morph", [&] {
        return morph_pair(n1, n2, lm1, lm2, view, o.alpha, o.debug_dir.empty() ? nullptr : &inter);
    });

    HoleFillResult filled = stage("holefill", [&] {
        return fill_holes(morph, view, o.holefill.params(o.debug_dir));
    });
    for (const auto& warning : filled.warnings)
        std::cerr << "morphcloud: [holefill] warning: " << warning << "\n";

    ColoredPointCloud cleaned = stage("cleanup", [&] {
        return clip_sphere_region(filled.cloud, min_enclosing_sphere(filled.cloud),
                                  o.keep_fraction);
    });

    stage("write", [&] { save_ply(cleaned, o.output); });

    if (!o.debug_dir.empty()) {
        stage("write", [&] {
            dump_maps(inter.maps1, view, o.debug_dir, "subject1");
            dump_maps(inter.maps2, view, o.debug_dir, "subject2");
            dump_maps(inter.warped1, view, o.debug_dir, "warped1");
            dump_maps(inter.warped2, view, o.debug_dir, "warped2");
            dump_maps(inter.blended, view, o.debug_dir, "blended");
            dump_maps(filled.maps, view, o.debug_dir, "filled");
        });
    }

    json params = {{"input1", o.input1},
                   {"input2", o.input2},
                   {"landmarks1", o.landmarks1},
                   {"landmarks2", o.landmarks2},
                   {"output", o.output},
                   {"alpha", o.alpha},
                   {"target_radius", o.target_radius},
                   {"keep_fraction", o.keep_fraction},
                   {"debug_dir", o.debug_dir},
                   {"view", o.view.to_json()},
                   {"holefill", o.holefill.to_json()}};
    stage("write", [&] {
        write_manifest(default_manifest_path(o.manifest, o.output), "morph", params);
    });

    std::printf("input points   %zu / %zu\n", pc1.size(), pc2.size());
    std::printf("morph points   %zu\n", morph.size());
    std::printf("output points  %zu\n", cleaned.size());
    std::printf("output         %s\n", o.output.c_str());
    return 0;
}

// ---------------------------------------------------------------- cmd_holefill

struct HolefillCmdOptions {
    std::string input, output, manifest, from_manifest_path, debug_dir;
    ViewOptions view;
    HoleFillOptions holefill;
};

void setup_holefill(CLI::App& app, HolefillCmdOptions& o) {
    CLI::App* cmd = app.add_subcommand(
        "holefill", "Fill occlusion holes of a morphed cloud via multi-view averaging");
    cmd->add_option("-i,--input", o.input, "Input (normalized) cloud PLY");
    cmd->add_option("-o,--output", o.output, "Filled cloud PLY");
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <output>.manifest.json)");
    cmd->add_option("--from-manifest", o.from_manifest_path,
                    "Load parameters from a previous run's manifest; flags win");
    cmd->add_option("--debug-dir", o.debug_dir, "Dump per-view rasters as PNG here");
    o.view.add_flags(cmd);
    o.holefill.add_flags(cmd);
}

int run_holefill(HolefillCmdOptions& o) {
    require_option(o.input, "--input");
    require_option(o.output, "--output");
    CanonicalView view = o.view.view();
    if (!o.debug_dir.empty()) std::filesystem::create_directories(o.debug_dir);

    ColoredPointCloud cloud = stage("load", [&] { return load_ply(o.input); });
    HoleFillResult filled = stage("holefill", [&] {
        return fill_holes(cloud, view, o.holefill.params(o.debug_dir));
    });
    for (const auto& warning : filled.warnings)
        std::cerr << "morphcloud: [holefill] warning: " << warning << "\n";
    stage("write", [&] { save_ply(filled.cloud, o.output); });

    json params = {{"input", o.input},       {"output", o.output}, {"debug_dir", o.debug_dir},
                   {"view", o.view.to_json()}, {"holefill", o.holefill.to_json()}};
    stage("write", [&] {
        write_manifest(default_manifest_path(o.manifest, o.output), "holefill", params);
    });

    std::printf("input points   %zu\n", cloud.size());
    std::printf("output points  %zu\n", filled.cloud.size());
    std::printf("views used     %zu/%zu\n",
                static_cast<size_t>(std::count(filled.view_used.begin(), filled.view_used.end(),
                                               uint8_t{1})),
                filled.view_used.size());
    std::printf("output         %s\n", o.output.c_str());
    return 0;
}

// ----------------------------------------------------------------- cmd_cleanup

struct CleanupCmdOptions {
    std::string input, output, manifest, from_manifest_path;
    double keep_fraction = 0.95;
};

void setup_cleanup(CLI::App& app, CleanupCmdOptions& o) {
    CLI::App* cmd =
        app.add_subcommand("cleanup", "Trim stray points near the bounding-sphere boundary");
    cmd->add_option("-i,--input", o.input, "Input cloud PLY");
    cmd->add_option("-o,--output", o.output, "Trimmed cloud PLY");
    cmd->add_option("--keep-fraction", o.keep_fraction,
                    "Keep points within this fraction of the bounding radius")
        ->capture_default_str();
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <output>.manifest.json)");
    cmd->add_option("--from-manifest", o.from_manifest_path,
                    "Load parameters from a previous run's manifest; flags win");
}

int run_cleanup(const CleanupCmdOptions& o) {
    require_option(o.input, "--input");
    require_option(o.output, "--output");
    ColoredPointCloud cloud = stage("load", [&] { return load_ply(o.input); });
    ColoredPointCloud cleaned = stage("cleanup", [&] {
        return clip_sphere_region(cloud, min_enclosing_sphere(cloud), o.keep_fraction);
    });
    stage("write", [&] { save_ply(cleaned, o.output); });
    json params = {
        {"input", o.input}, {"output", o.output}, {"keep_fraction", o.keep_fraction}};
    stage("write", [&] {
        write_manifest(default_manifest_path(o.manifest, o.output), "cleanup", params);
    });
    std::printf("input points   %zu\n", cloud.size());
    std::printf("output points  %zu\n", cleaned.size());
    std::printf("output         %s\n", o.output.c_str());
    return 0;
}

// ----------------------------------------------------------------- cmd_quality

struct QualityCmdOptions {
    std::string input, report, per_point, manifest;
    size_t neighbors = 30;
    int bins = 256;
};

void setup_quality(CLI::App& app, QualityCmdOptions& o) {
    CLI::App* cmd = app.add_subcommand("quality", "Quality features of a colored point cloud");
    cmd->add_option("-i,--input", o.input, "Input cloud PLY");
    cmd->add_option("--report", o.report, "Write the JSON quality report here");
    cmd->add_option("--per-point", o.per_point, "Write per-point eigen features as CSV here");
    cmd->add_option("--neighbors", o.neighbors, "Neighborhood size for eigen features")
        ->capture_default_str();
    cmd->add_option("--bins", o.bins, "Histogram bins for entropy scores")
        ->capture_default_str();
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <report>.manifest.json)");
}

int run_quality(const QualityCmdOptions& o) {
    require_option(o.input, "--input");
    ColoredPointCloud cloud = stage("load", [&] { return load_ply(o.input); });
    QualityReport q =
        stage("quality", [&] { return quality_report(cloud, o.neighbors, o.bins); });

    std::printf("points     %zu\n", cloud.size());
    std::printf("neighbors  %zu\n", q.neighbors);
    std::printf("bins       %d\n", q.bins);
    std::printf("entropy  L          %.4f\n", q.l_color);
    std::printf("entropy  A          %.4f\n", q.a_color);
    std::printf("entropy  B          %.4f\n", q.b_color);
    std::printf("entropy  linearity  %.4f\n", q.linearity);
    std::printf("entropy  planarity  %.4f\n", q.planarity);
    std::printf("entropy  sphericity %.4f\n", q.sphericity);
    std::printf("entropy  anisotropy %.4f\n", q.anisotropy);
    std::printf("entropy  curvature  %.4f\n", q.curvature);

    if (!o.report.empty()) {
        json rep = {{"format", kReportFormat},
                    {"command", "quality"},
                    {"tool_version", kToolVersion},
                    {"input", o.input},
                    {"points", cloud.size()},
                    {"neighbors", q.neighbors},
                    {"bins", q.bins},
                    {"entropy",
                     {{"l", q.l_color},
                      {"a", q.a_color},
                      {"b", q.b_color},
                      {"linearity", q.linearity},
                      {"planarity", q.planarity},
                      {"sphericity", q.sphericity},
                      {"anisotropy", q.anisotropy},
                      {"curvature", q.curvature}}}};
        stage("write", [&] { write_json_file(rep, o.report, "report"); });
    }

    if (!o.per_point.empty()) {
        stage("write", [&] {
            std::ofstream out(o.per_point);
            if (!out)
                throw Error(Errc::IoError, "cannot write per-point CSV '" + o.per_point + "'");
            out << "index,linearity,planarity,sphericity,anisotropy,curvature\n";
            for (size_t i = 0; i < q.geometry.size(); ++i)
                out << i << ',' << double_repr(q.geometry.linearity[i]) << ','
                    << double_repr(q.geometry.planarity[i]) << ','
                    << double_repr(q.geometry.sphericity[i]) << ','
                    << double_repr(q.geometry.anisotropy[i]) << ','
                    << double_repr(q.geometry.curvature[i]) << '\n';
        });
    }

    if (!o.report.empty() || !o.manifest.empty()) {
        json params = {{"input", o.input},
                       {"report", o.report},
                       {"per_point", o.per_point},
                       {"neighbors", o.neighbors},
                       {"bins", o.bins}};
        std::string primary = o.report.empty() ? o.per_point : o.report;
        stage("write", [&] {
            write_manifest(default_manifest_path(o.manifest, primary), "quality", params);
        });
    }
    return 0;
}

// -------------------------------------------------------------------- cmd_vuln

struct VulnCmdOptions {
    std::string scores, nonmated, labeled, report, det_csv, manifest;
    double threshold = 0.0;
    double far = 0.0;
    bool has_threshold = false, has_far = false;
    bool min_over_attempts = false;
};

void setup_vuln(CLI::App& app, VulnCmdOptions& o) {
    CLI::App* cmd = app.add_subcommand(
        "vuln", "Morphing vulnerability rates from verification score files");
    cmd->add_option("--scores", o.scores,
                    "Morph score CSV: morph_id,subject_idx(1|2),attempt_idx,score");
    auto* thr = cmd->add_option("--threshold", o.threshold, "Verification threshold");
    auto* far = cmd->add_option("--far", o.far,
                                "Derive the threshold at this false-accept rate (needs "
                                "--nonmated)");
    cmd->add_option("--nonmated", o.nonmated,
                    "Non-mated comparison scores, one per CSV row (first cell)");
    cmd->add_option("--labeled", o.labeled,
                    "Labeled score CSV sample_id,score,label for DET metrics");
    cmd->add_option("--det-csv", o.det_csv, "Write the DET curve (apcer,bpcer rows) here");
    cmd->add_option("--report", o.report, "Write the JSON vulnerability report here");
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <report>.manifest.json)");
    cmd->add_flag("--min-over-attempts", o.min_over_attempts,
                  "Aggregate a subject's attempts with min instead of max");
    thr->excludes(far);
    o.has_threshold = false;
    o.has_far = false;
    thr->each([&o](const std::string&) { o.has_threshold = true; });
    far->each([&o](const std::string&) { o.has_far = true; });
}

std::vector<double> load_plain_scores(const std::string& path) {
    std::vector<double> out;
    for_each_csv_row(path, 1, 0, [&](const std::vector<std::string>& cells, size_t lineno) {
        out.push_back(parse_csv_number(cells[0], path, lineno));
    });
    if (out.empty()) throw Error(Errc::InvalidArgument, "'" + path + "' has no scores");
    return out;
}

int run_vuln(const VulnCmdOptions& o) {
    require_option(o.scores, "--scores");
    if (!o.has_threshold && !o.has_far)
        throw Error(Errc::InvalidArgument, "one of --threshold / --far is required");
    if (o.has_far && o.nonmated.empty())
        throw Error(Errc::InvalidArgument, "--far needs --nonmated scores");

    ScoreMatrix matrix = stage("scores", [&] { return load_score_matrix_csv(o.scores); });
    double threshold = o.threshold;
    if (o.has_far) {
        std::vector<double> nm = stage("scores", [&] { return load_plain_scores(o.nonmated); });
        threshold = stage("vuln", [&] { return threshold_at_far(nm, o.far); });
    }

    double mm = stage("vuln", [&] { return mmpmr(matrix, threshold, o.min_over_attempts); });
    bool paired = true;
    double fm = 0.0;
    try {
        fm = fmmpmr(matrix, threshold);
    } catch (const Error& e) {
        if (e.code() != Errc::UnpairedAttempts) throw;
        paired = false;
        std::cerr << "morphcloud: [vuln] warning: " << e.what()
                  << " -- fmmpmr skipped\n";
    }

    std::printf("morphs         %zu\n", matrix.morphs.size());
    std::printf("threshold      %.6g%s\n", threshold, o.has_far ? " (derived)" : "");
    std::printf("mmpmr          %.6f\n", mm);
    if (paired)
        std::printf("fmmpmr         %.6f\n", fm);
    else
        std::printf("fmmpmr         n/a (unpaired attempts)\n");

    json rep = {{"format", kReportFormat},
                {"command", "vuln"},
                {"tool_version", kToolVersion},
                {"scores", o.scores},
                {"morphs", matrix.morphs.size()},
                {"threshold", threshold},
                {"min_over_attempts", o.min_over_attempts},
                {"mmpmr", mm},
                {"fmmpmr", paired ? json(fm) : json(nullptr)}};
    if (o.has_far) {
        rep["far"] = o.far;
        rep["nonmated"] = o.nonmated;
    }

    if (!o.labeled.empty()) {
        auto [attack, bonafide] =
            stage("scores", [&] { return load_labeled_scores_csv(o.labeled); });
        DetReport det = stage("vuln", [&] { return det_metrics(attack, bonafide); });
        std::printf("d-eer          %.6f\n", det.eer);
        std::printf("bpcer@apcer5   %.6f\n", det.bpcer_at_apcer5);
        std::printf("bpcer@apcer10  %.6f\n", det.bpcer_at_apcer10);
        rep["det"] = {{"labeled", o.labeled},
                      {"eer", det.eer},
                      {"bpcer_at_apcer5", det.bpcer_at_apcer5},
                      {"bpcer_at_apcer10", det.bpcer_at_apcer10}};
        if (!o.det_csv.empty()) {
            stage("write", [&] {
                std::ofstream out(o.det_csv);
                if (!out) throw Error(Errc::IoError, "cannot write DET CSV '" + o.det_csv + "'");
                out << "apcer,bpcer\n";
                for (const auto& pt : det.curve)
                    out << double_repr(pt.apcer) << ',' << double_repr(pt.bpcer) << '\n';
            });
        }
    } else if (!o.det_csv.empty()) {
        throw Error(Errc::InvalidArgument, "--det-csv needs --labeled scores");
    }

    if (!o.report.empty()) stage("write", [&] { write_json_file(rep, o.report, "report"); });
    if (!o.report.empty() || !o.manifest.empty()) {
        json params = {{"scores", o.scores},
                       {"threshold", o.has_threshold ? json(o.threshold) : json(nullptr)},
                       {"far", o.has_far ? json(o.far) : json(nullptr)},
                       {"nonmated", o.nonmated},
                       {"labeled", o.labeled},
                       {"det_csv", o.det_csv},
                       {"report", o.report},
                       {"min_over_attempts", o.min_over_attempts}};
        stage("write", [&] {
            write_manifest(default_manifest_path(o.manifest, o.report), "vuln", params);
        });
    }
    return 0;
}

// --------------------------------------------------------------- cmd_mad_train

struct MadTrainOptions {
    std::string features, model, manifest;
    double c = 1.0;
    size_t epochs = 200;
    uint64_t seed = 1;
};

void setup_mad_train(CLI::App& app, MadTrainOptions& o) {
    CLI::App* cmd = app.add_subcommand(
        "mad-train", "Train the linear morphing-attack detector on a feature CSV");
    cmd->add_option("--features", o.features, "Training CSV: sample_id,label,v1..vN");
    cmd->add_option("--model", o.model, "Write the model JSON here");
    cmd->add_option("--c", o.c, "Hinge-loss weight")->capture_default_str();
    cmd->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Recorded RNG seed")->capture_default_str();
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <model>.manifest.json)");
}

int run_mad_train(const MadTrainOptions& o) {
    require_option(o.features, "--features");
    require_option(o.model, "--model");
    std::vector<FeatureVector> train =
        stage("features", [&] { return load_feature_csv(o.features); });
    std::vector<double> trace;
    LinearModel model =
        stage("train", [&] { return train_linear_svm(train, o.c, o.epochs, o.seed, &trace); });
    stage("write", [&] { save_linear_model(model, o.model); });

    size_t bona = 0;
    for (const auto& f : train)
        if (f.label == SampleLabel::Bonafide) ++bona;
    std::printf("samples        %zu (%zu bona fide / %zu morph)\n", train.size(), bona,
                train.size() - bona);
    std::printf("dims           %zu (%zu constant dropped)\n", model.weights.size(),
                model.dropped_dims.size());
    std::printf("objective      %.6g -> %.6g over %zu epochs\n", trace.front(), trace.back(),
                trace.size());
    std::printf("model          %s\n", o.model.c_str());

    json params = {{"features", o.features},
                   {"model", o.model},
                   {"c", o.c},
                   {"epochs", o.epochs},
                   {"seed", o.seed}};
    stage("write", [&] {
        write_manifest(default_manifest_path(o.manifest, o.model), "mad-train", params);
    });
    return 0;
}

// ---------------------------------------------------------------- cmd_mad_eval

struct MadEvalOptions {
    std::string features, model, report, det_csv, scores_csv, manifest;
};

void setup_mad_eval(CLI::App& app, MadEvalOptions& o) {
    CLI::App* cmd = app.add_subcommand(
        "mad-eval", "Evaluate a trained morphing-attack detector on a feature CSV");
    cmd->add_option("--features", o.features, "Test CSV: sample_id,label,v1..vN");
    cmd->add_option("--model", o.model, "Model JSON from mad-train");
    cmd->add_option("--report", o.report, "Write the JSON detection report here");
    cmd->add_option("--det-csv", o.det_csv, "Write the DET curve (apcer,bpcer rows) here");
    cmd->add_option("--scores-csv", o.scores_csv,
                    "Write per-sample decision scores as CSV here");
    cmd->add_option("--manifest", o.manifest, "Manifest path (default: <report>.manifest.json)");
}

int run_mad_eval(const MadEvalOptions& o) {
    require_option(o.features, "--features");
    require_option(o.model, "--model");
    std::vector<FeatureVector> test =
        stage("features", [&] { return load_feature_csv(o.features); });
    LinearModel model = stage("model", [&] { return load_linear_model(o.model); });
    MadEvalReport rep = stage("eval", [&] { return evaluate(model, test); });

    std::printf("samples        %zu (%zu bona fide / %zu morph)\n", test.size(),
                rep.bonafide_count, rep.morph_count);
    std::printf("d-eer          %.6f\n", rep.det.eer);
    std::printf("bpcer@apcer5   %.6f\n", rep.det.bpcer_at_apcer5);
    std::printf("bpcer@apcer10  %.6f\n", rep.det.bpcer_at_apcer10);

    if (!o.report.empty()) {
        json j = {{"format", kReportFormat},
                  {"command", "mad-eval"},
                  {"tool_version", kToolVersion},
                  {"features", o.features},
                  {"model", o.model},
                  {"bonafide", rep.bonafide_count},
                  {"morph", rep.morph_count},
                  {"eer", rep.det.eer},
                  {"bpcer_at_apcer5", rep.det.bpcer_at_apcer5},
                  {"bpcer_at_apcer10", rep.det.bpcer_at_apcer10}};
        stage("write", [&] { write_json_file(j, o.report, "report"); });
    }
    if (!o.det_csv.empty()) {
        stage("write", [&] {
            std::ofstream out(o.det_csv);
            if (!out) throw Error(Errc::IoError, "cannot write DET CSV '" + o.det_csv + "'");
            out << "apcer,bpcer\n";
            for (const auto& pt : rep.det.curve)
                out << double_repr(pt.apcer) << ',' << double_repr(pt.bpcer) << '\n';
        });
    }
    if (!o.scores_csv.empty()) {
        stage("write", [&] {
            std::ofstream out(o.scores_csv);
            if (!out)
                throw Error(Errc::IoError, "cannot write scores CSV '" + o.scores_csv + "'");
            out << "sample_id,score,label\n";
            for (size_t i = 0; i < test.size(); ++i)
                out << test[i].sample_id << ',' << double_repr(rep.scores[i]) << ','
                    << (test[i].label == SampleLabel::Morph ? "morph" : "bonafide") << '\n';
        });
    }
    if (!o.report.empty() || !o.manifest.empty()) {
        json params = {{"features", o.features}, {"model", o.model},
                       {"report", o.report},     {"det_csv", o.det_csv},
                       {"scores_csv", o.scores_csv}};
        stage("write", [&] {
            write_manifest(default_manifest_path(o.manifest, o.report), "mad-eval", params);
        });
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"morphcloud: 3D face morph generation and evaluation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("morphcloud ") + kToolVersion);
    app.set_config("--config", "", "Read options from a TOML config file; flags win");
    app.footer("Environment: MORPHCLOUD_THREADS caps worker threads, "
               "MORPHCLOUD_KERNELS selects the per-axis kernel backend.");

    MorphOptions morph_opts;
    HolefillCmdOptions holefill_opts;
    CleanupCmdOptions cleanup_opts;
    QualityCmdOptions quality_opts;
    VulnCmdOptions vuln_opts;
    MadTrainOptions mad_train_opts;
    MadEvalOptions mad_eval_opts;

    // --from-manifest values become the defaults, so explicit flags win: they
    // are applied on top during the regular parse below.
    try {
        std::string cmd;
        for (int i = 1; i < argc; ++i) {
            std::string arg = argv[i];
            if (cmd.empty() &&
                (arg == "morph" || arg == "holefill" || arg == "cleanup" || arg == "quality" ||
                 arg == "vuln" || arg == "mad-train" || arg == "mad-eval"))
                cmd = arg;
        }
        for (int i = 1; i + 1 < argc; ++i) {
            std::string arg = argv[i];
            if (arg == "--from-manifest") {
                if (cmd == "morph") {
                    morph_opts.from_manifest_path = argv[i + 1];
                    apply_morph_manifest(morph_opts);
                } else if (cmd == "holefill") {
                    holefill_opts.from_manifest_path = argv[i + 1];
                    json p = manifest_params(holefill_opts.from_manifest_path, "holefill");
                    from_manifest(p, "input", holefill_opts.input);
                    from_manifest(p, "output", holefill_opts.output);
                    from_manifest(p, "debug_dir", holefill_opts.debug_dir);
                    holefill_opts.view.apply_manifest(p);
                    holefill_opts.holefill.apply_manifest(p);
                } else if (cmd == "cleanup") {
                    cleanup_opts.from_manifest_path = argv[i + 1];
                    json p = manifest_params(cleanup_opts.from_manifest_path, "cleanup");
                    from_manifest(p, "input", cleanup_opts.input);
                    from_manifest(p, "output", cleanup_opts.output);
                    from_manifest(p, "keep_fraction", cleanup_opts.keep_fraction);
                }
            }
        }
    } catch (const Error& e) {
        std::cerr << "morphcloud: " << e.what() << "\n";
        return e.exit_code();
    }

    setup_morph(app, morph_opts);
    setup_holefill(app, holefill_opts);
    setup_cleanup(app, cleanup_opts);
    setup_quality(app, quality_opts);
    setup_vuln(app, vuln_opts);
    setup_mad_train(app, mad_train_opts);
    setup_mad_eval(app, mad_eval_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("morph")) return run_morph(morph_opts);
        if (app.got_subcommand("holefill")) return run_holefill(holefill_opts);
        if (app.got_subcommand("cleanup")) return run_cleanup(cleanup_opts);
        if (app.got_subcommand("quality")) return run_quality(quality_opts);
        if (app.got_subcommand("vuln")) return run_vuln(vuln_opts);
        if (app.got_subcommand("mad-train")) return run_mad_train(mad_train_opts);
        if (app.got_subcommand("mad-eval")) return run_mad_eval(mad_eval_opts);
    } catch (const Error& e) {
        std::cerr << "morphcloud: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "morphcloud: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
