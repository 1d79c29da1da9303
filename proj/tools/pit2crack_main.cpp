// pit2crack command-line front end: stochastic pit generation, ellipsoidal
// idealization, STL meshing, and critical-plane fatigue life analysis as
// reproducible batch commands. Every command writes a manifest.json with
// the resolved configuration, seeds, and content digests of all files.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pit2crack/pit2crack.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct OutDir {
    fs::path dir;
    p2c::RunManifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit OutDir(const std::string& path, std::string command) : dir(path) {
        fs::create_directories(dir);
        manifest.command = std::move(command);
    }

    fs::path write(const std::string& name, std::string_view text) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.close();
        if (!out) throw p2c::Error("cannot write '" + p.string() + "'");
        manifest.add_output(p.string());
        return p;
    }

    fs::path write(const std::string& name, const std::vector<std::uint8_t>& bytes) {
        return write(name, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                            bytes.size()));
    }

    void finish() {
        manifest.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const fs::path p = dir / "manifest.json";
        std::ofstream out(p, std::ios::binary);
        out << manifest.to_json().dump(2) << "\n";
        if (!out) throw p2c::Error("cannot write '" + p.string() + "'");
    }
};

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("PIT2CRACK_SEED");
    if (!v) return std::nullopt;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw p2c::ParseError("PIT2CRACK_SEED: '" + std::string(v) + "' is not an integer");
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw p2c::ParseError("cannot open config '" + path + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const std::exception& e) {
        throw p2c::ParseError("invalid JSON in '" + path + "': " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw p2c::ParseError("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const json& config,
                           const char* field) {
    if (flag) return *flag;
    if (config.contains(field)) return config.at(field).get<std::uint64_t>();
    if (auto env = env_seed()) return *env;
    throw p2c::ParseError(std::string("config error at ") + field +
                          ": field is missing (pass --seed or set PIT2CRACK_SEED)");
}

p2c::LoadAxis parse_axis(const std::string& s) {
    if (s == "x") return p2c::LoadAxis::x;
    if (s == "y") return p2c::LoadAxis::y;
    throw p2c::ParseError("--load-axis must be 'x' or 'y' (got '" + s + "')");
}

json metrics_json(const p2c::PitMetrics& m, const std::string& axis, double threshold) {
    return {{"d", m.d},
            {"w", m.w},
            {"l", m.l},
            {"ra", m.ra},
            {"footprint_area", m.footprint_area},
            {"load_axis", axis},
            {"depth_threshold", threshold}};
}

p2c::HeightField load_field_file(const std::string& path, double dx, double dy) {
    const auto bytes = p2c::read_file_bytes(path);
    if (bytes.size() >= 4 && p2c::detail::get_u32(bytes, 0) == p2c::kGridMagic)
        return p2c::heightfield_from_binary(bytes);
    return p2c::heightfield_from_csv(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), dx, dy);
}

// ---- subcommands -----------------------------------------------------------

int cmd_generate(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                 const std::string& out, const std::string& axis, double threshold) {
    const json config = read_json_file(config_path);
    p2c::HierarchySpec spec = p2c::hierarchy_from_json(config);
    spec.seed = resolve_seed(seed_flag, config, "seed");

    OutDir od(out, "generate");
    od.manifest.add_input(config_path);
    od.manifest.seeds = {spec.seed};
    od.manifest.config = {{"hierarchy", p2c::hierarchy_to_json(spec)},
                          {"load_axis", axis},
                          {"depth_threshold", threshold},
                          {"out", out}};

    const auto result = p2c::generate_pit(spec);
    const auto metrics = p2c::measure(result.field, parse_axis(axis), threshold);
    od.write("heightfield.csv", p2c::heightfield_to_csv(result.field));
    od.write("heightfield.grid", p2c::heightfield_to_binary(result.field));
    od.write("caps.csv", p2c::caps_to_csv(result.caps));
    od.write("metrics.json", metrics_json(metrics, axis, threshold).dump(2) + "\n");
    od.finish();
    std::cout << "generated " << result.caps.size() << " caps, max depth "
              << p2c::format_double(metrics.d) << " um -> " << out << "\n";
    return 0;
}

int cmd_idealize(double depth, double width, int nx, int ny, double dx, double dy,
                 const std::string& out, const std::string& axis, double threshold) {
    OutDir od(out, "idealize");
    od.manifest.config = {{"depth", depth}, {"width", width}, {"nx", nx},  {"ny", ny},
                          {"dx", dx},       {"dy", dy},       {"out", out}};
    const auto field = p2c::ellipsoid_field(depth, width, nx, ny, dx, dy);
    const auto metrics = p2c::measure(field, parse_axis(axis), threshold);
    od.write("heightfield.csv", p2c::heightfield_to_csv(field));
    od.write("heightfield.grid", p2c::heightfield_to_binary(field));
    od.write("metrics.json", metrics_json(metrics, axis, threshold).dump(2) + "\n");
    od.finish();
    std::cout << "idealized pit d=" << p2c::format_double(depth)
              << " um, D=" << p2c::format_double(width) << " um -> " << out << "\n";
    return 0;
}

int cmd_mesh(const std::string& field_path, double dx, double dy, const std::string& format,
             std::optional<double> slab, const std::string& out) {
    OutDir od(out, "mesh");
    od.manifest.add_input(field_path);
    od.manifest.config = {{"field", field_path},
                          {"format", format},
                          {"dx", dx},
                          {"dy", dy},
                          {"slab", slab ? json(*slab) : json(nullptr)},
                          {"out", out}};
    const auto field = load_field_file(field_path, dx, dy);
    const auto mode = slab ? p2c::MeshMode::closed_slab : p2c::MeshMode::surface_only;
    const auto mesh = p2c::field_to_mesh(field, mode, slab.value_or(0.0));
    const auto stl_format = format == "ascii" ? p2c::StlFormat::ascii : p2c::StlFormat::binary;
    od.write("mesh.stl", p2c::write_stl(mesh, stl_format));
    od.finish();
    std::cout << "meshed " << mesh.triangles.size() << " triangles -> " << out << "\n";
    return 0;
}

int cmd_life(const std::string& history_path, const std::string& material_name,
             const p2c::AnalysisSettings& settings, double repeat_count, int jobs,
             const std::string& out) {
    settings.validate();
    const p2c::MaterialRecord material = p2c::load_material(material_name);
    auto histories = p2c::parse_history_csv(read_text_file(history_path));
    if (histories.empty())
        throw p2c::ParseError("history csv '" + history_path + "' contains no data rows");
    for (auto& h : histories) h.repeat_count = repeat_count;

    OutDir od(out, "life");
    od.manifest.add_input(history_path);
    if (material_name != "Q235") od.manifest.add_input(material_name);
    od.manifest.config = {{"history", history_path},
                          {"material", material_name},
                          {"settings", p2c::settings_to_json(settings)},
                          {"repeat_count", repeat_count},
                          {"jobs", jobs},
                          {"out", out}};

    const auto field = p2c::life_field(histories, material, settings, jobs);
    od.write("results.csv", p2c::life_results_csv(field));
    od.write("report.json", p2c::life_report_json(field, material, settings).dump(2) + "\n");
    od.finish();

    const auto& worst = field.results[field.worst_index];
    if (worst.infinite_life())
        std::cout << "worst location " << worst.location_id << ": no damage, infinite life\n";
    else
        std::cout << "worst location " << worst.location_id
                  << ": Nf = " << p2c::format_double(worst.nf)
                  << " cycles (log10 = " << p2c::format_double(worst.log10_life) << ")\n";
    return 0;
}

int cmd_validate_intact(double ksur, p2c::AnalysisSettings settings) {
    const auto v = p2c::validate_intact(ksur, settings);
    std::cout << "intact Q235 specimen, " << p2c::format_double(p2c::kIntactSigmaMax) << "/"
              << p2c::format_double(p2c::kIntactSigmaMin) << " MPa uniaxial (R = 0.1)\n"
              << "  ksur            = " << p2c::format_double(v.ksur) << "\n"
              << "  Nf              = " << p2c::format_double(v.result.nf) << " cycles\n"
              << "  log10(Nf)       = " << p2c::format_double(v.result.log10_life) << "\n"
              << "  acceptance band = [" << p2c::format_double(p2c::kIntactBandLo) << ", "
              << p2c::format_double(p2c::kIntactBandHi) << "] cycles\n"
              << (v.pass ? "PASS" : "FAIL") << "\n";
    return v.pass ? 0 : 1;
}

int cmd_batch(const std::string& config_path, int samples, std::optional<std::uint64_t> seed_flag,
              int jobs, const std::string& axis, double threshold, const std::string& out) {
    const json config = read_json_file(config_path);
    const p2c::HierarchySpec spec = p2c::hierarchy_from_json(config);
    const std::uint64_t seed_stream = resolve_seed(seed_flag, config, "seed");

    OutDir od(out, "batch");
    od.manifest.add_input(config_path);
    od.manifest.seeds = {seed_stream};
    od.manifest.config = {{"hierarchy", p2c::hierarchy_to_json(spec)},
                          {"samples", samples},
                          {"seed_stream", seed_stream},
                          {"jobs", jobs},
                          {"load_axis", axis},
                          {"depth_threshold", threshold},
                          {"out", out}};

    const auto summary =
        p2c::batch_generate(spec, samples, seed_stream, parse_axis(axis), jobs, threshold);

    std::string csv = "sample,seed,d,w,l,ra,footprint_area\n";
    for (size_t i = 0; i < summary.samples.size(); ++i) {
        const auto& m = summary.samples[i];
        csv += std::to_string(i) + "," + std::to_string(summary.seeds[i]) + "," +
               p2c::format_double(m.d) + "," + p2c::format_double(m.w) + "," +
               p2c::format_double(m.l) + "," + p2c::format_double(m.ra) + "," +
               p2c::format_double(m.footprint_area) + "\n";
    }
    od.write("samples.csv", csv);

    auto stat = [](const p2c::MetricStats& s) {
        return json{{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
    };
    const json jsum = {{"n_samples", samples},
                       {"seed_stream", seed_stream},
                       {"metrics",
                        {{"d", stat(summary.d)},
                         {"w", stat(summary.w)},
                         {"l", stat(summary.l)},
                         {"ra", stat(summary.ra)},
                         {"footprint_area", stat(summary.footprint_area)}}}};
    od.write("summary.json", jsum.dump(2) + "\n");
    od.finish();
    std::cout << "batch of " << samples << " samples: mean d = "
              << p2c::format_double(summary.d.mean) << " um -> " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pit2crack: stochastic pitting morphology generation and "
                 "critical-plane fatigue life analysis"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a stochastic pit heightfield");
    std::string gen_config, gen_out = "out", gen_axis = "x";
    std::optional<std::uint64_t> gen_seed;
    double gen_threshold = p2c::kDefaultDepthThreshold;
    gen->add_option("--config", gen_config, "HierarchySpec JSON config")->required();
    gen->add_option("--seed", gen_seed, "Seed override (else config, else PIT2CRACK_SEED)");
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--load-axis", gen_axis, "Load axis for metrics: x or y");
    gen->add_option("--depth-threshold", gen_threshold, "Footprint depth threshold, um");

    // idealize
    auto* ide = app.add_subcommand("idealize", "Build the ellipsoidal idealization of a pit");
    double ide_d = 0, ide_w = 0, ide_dx = 20, ide_dy = 20;
    int ide_nx = 201, ide_ny = 201;
    std::string ide_out = "out", ide_axis = "x";
    double ide_threshold = p2c::kDefaultDepthThreshold;
    ide->add_option("--depth", ide_d, "Max pit depth d, um")->required();
    ide->add_option("--width", ide_w, "Surface diameter D (pit width w), um")->required();
    ide->add_option("--nx", ide_nx, "Grid points in x");
    ide->add_option("--ny", ide_ny, "Grid points in y");
    ide->add_option("--dx", ide_dx, "Grid spacing in x, um");
    ide->add_option("--dy", ide_dy, "Grid spacing in y, um");
    ide->add_option("--out", ide_out, "Output directory");
    ide->add_option("--load-axis", ide_axis, "Load axis for metrics: x or y");
    ide->add_option("--depth-threshold", ide_threshold, "Footprint depth threshold, um");

    // mesh
    auto* msh = app.add_subcommand("mesh", "Convert a heightfield to an STL mesh");
    std::string msh_field, msh_format = "binary", msh_out = "out";
    double msh_dx = 20, msh_dy = 20;
    std::optional<double> msh_slab;
    msh->add_option("--field", msh_field, "Heightfield file (.grid or .csv)")->required();
    msh->add_option("--stl", msh_format, "STL flavor: binary or ascii")
        ->check(CLI::IsMember({"binary", "ascii"}));
    msh->add_option("--dx", msh_dx, "Grid spacing in x for CSV input, um");
    msh->add_option("--dy", msh_dy, "Grid spacing in y for CSV input, um");
    msh->add_option("--slab", msh_slab, "Close the mesh into a slab of this thickness, um");
    msh->add_option("--out", msh_out, "Output directory");

    // life
    auto* lif = app.add_subcommand("life", "Critical-plane fatigue life from a history CSV");
    std::string lif_history, lif_material = "Q235", lif_mean = "morrow", lif_out = "out";
    p2c::AnalysisSettings lif_settings;
    double lif_repeat = 1.0;
    int lif_jobs = 1;
    lif->add_option("--history", lif_history, "Stress/strain history CSV")->required();
    lif->add_option("--material", lif_material, "Material JSON path or built-in name (Q235)");
    lif->add_option("--plane-step", lif_settings.plane_step_deg, "Plane grid step, degrees");
    lif->add_option("--psi-step", lif_settings.psi_step_deg, "Shear direction step, degrees");
    lif->add_option("--ksur", lif_settings.ksur, "Surface finish factor >= 1");
    lif->add_option("--mean-stress", lif_mean, "Mean stress correction: morrow or none")
        ->check(CLI::IsMember({"morrow", "none"}));
    lif->add_option("--repeat-count", lif_repeat, "Load cycles represented by one history pass");
    lif->add_option("--jobs", lif_jobs, "Worker threads over locations");
    lif->add_option("--out", lif_out, "Output directory");

    // validate-intact
    auto* val = app.add_subcommand("validate-intact",
                                   "Self-check against the intact-specimen reference life");
    double val_ksur = p2c::kQ235IntactKsur;
    p2c::AnalysisSettings val_settings;
    val->add_option("--ksur", val_ksur, "Surface finish factor (default: calibrated value)");
    val->add_option("--plane-step", val_settings.plane_step_deg, "Plane grid step, degrees");
    val->add_option("--psi-step", val_settings.psi_step_deg, "Shear direction step, degrees");

    // batch
    auto* bat = app.add_subcommand("batch", "Monte-Carlo pit generation summary statistics");
    std::string bat_config, bat_out = "out", bat_axis = "x";
    std::optional<std::uint64_t> bat_seed;
    int bat_samples = 0, bat_jobs = 1;
    double bat_threshold = p2c::kDefaultDepthThreshold;
    bat->add_option("--config", bat_config, "HierarchySpec JSON config")->required();
    bat->add_option("--samples", bat_samples, "Number of samples")->required();
    bat->add_option("--seed-stream", bat_seed, "Seed stream (else config seed, else PIT2CRACK_SEED)");
    bat->add_option("--jobs", bat_jobs, "Worker threads over samples");
    bat->add_option("--load-axis", bat_axis, "Load axis for metrics: x or y");
    bat->add_option("--depth-threshold", bat_threshold, "Footprint depth threshold, um");
    bat->add_option("--out", bat_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) return cmd_generate(gen_config, gen_seed, gen_out, gen_axis, gen_threshold);
        if (*ide)
            return cmd_idealize(ide_d, ide_w, ide_nx, ide_ny, ide_dx, ide_dy, ide_out, ide_axis,
                                ide_threshold);
        if (*msh) return cmd_mesh(msh_field, msh_dx, msh_dy, msh_format, msh_slab, msh_out);
        if (*lif) {
            lif_settings.mean_stress_correction = lif_mean == "none"
                                                      ? p2c::MeanStressCorrection::none
                                                      : p2c::MeanStressCorrection::morrow;
            return cmd_life(lif_history, lif_material, lif_settings, lif_repeat, lif_jobs, lif_out);
        }
        if (*val) return cmd_validate_intact(val_ksur, val_settings);
        if (*bat)
            return cmd_batch(bat_config, bat_samples, bat_seed, bat_jobs, bat_axis, bat_threshold,
                             bat_out);
    } catch (const p2c::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
