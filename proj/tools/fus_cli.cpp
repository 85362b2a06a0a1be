// Command-line front end: simulate / plan / converge / validate.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fus/analysis.hpp"
#include "fus/cascade.hpp"
#include "fus/io.hpp"
#include "fus/medium.hpp"
#include "fus/potential.hpp"
#include "fus/transducer.hpp"
#include "fus/vie.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct RunConfig {
  std::string transducer = "H101";  // preset name or config path
  std::string medium = "water";     // preset name or config path
  double power = 100.0;             // W
  double f0_override = 0.0;         // Hz; 0 keeps the transducer's f0
  int n_harmonics = 5;
  int n_w = 6;
  double d = 10.2e-3;  // post-focal distance, m
  int n_points = 4096;
  std::string mode = "homogeneous";  // or "vie"
  std::string medium_map;            // header path, or slab:<medium>:<center_m>:<thickness_m>
  std::string out = "fus-out";
  int threads = 0;  // 0: leave as-is / env
  bool dump_fields = false;
  double width_scale = 1.0;
};

void to_json(json& j, const RunConfig& c) {
  j = json{{"transducer", c.transducer}, {"medium", c.medium},     {"power", c.power},
           {"f0_override", c.f0_override}, {"n_harmonics", c.n_harmonics}, {"n_w", c.n_w},
           {"d", c.d},                   {"n_points", c.n_points}, {"mode", c.mode},
           {"medium_map", c.medium_map}, {"out", c.out},           {"threads", c.threads},
           {"dump_fields", c.dump_fields}, {"width_scale", c.width_scale}};
}

void from_json(const json& j, RunConfig& c) {
  j.at("transducer").get_to(c.transducer);
  j.at("medium").get_to(c.medium);
  j.at("power").get_to(c.power);
  j.at("f0_override").get_to(c.f0_override);
  j.at("n_harmonics").get_to(c.n_harmonics);
  j.at("n_w").get_to(c.n_w);
  j.at("d").get_to(c.d);
  j.at("n_points").get_to(c.n_points);
  j.at("mode").get_to(c.mode);
  j.at("medium_map").get_to(c.medium_map);
  j.at("out").get_to(c.out);
  j.at("threads").get_to(c.threads);
  j.at("dump_fields").get_to(c.dump_fields);
  j.at("width_scale").get_to(c.width_scale);
}

void apply_threads(int flag_value) {
#ifdef _OPENMP
  int n = flag_value;
  if (n <= 0) {
    if (const char* env = std::getenv("FUS_THREADS")) n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
#else
  (void)flag_value;
#endif
}

fus::Medium resolve_medium(const std::string& spec) {
  return fus::is_medium_preset(spec) ? fus::medium_preset(spec) : fus::load_medium(spec);
}

fus::BowlTransducer resolve_transducer(const RunConfig& cfg) {
  fus::BowlTransducer t = fus::is_transducer_preset(cfg.transducer)
                              ? fus::transducer_preset(cfg.transducer, cfg.power, cfg.n_points)
                              : fus::load_transducer(cfg.transducer, cfg.power);
  if (cfg.f0_override > 0.0) t.f0 = cfg.f0_override;
  return t;
}

fus::MediumMap resolve_medium_map(const RunConfig& cfg, const fus::Medium& background,
                                  const fus::VoxelGrid& grid) {
  if (cfg.medium_map.rfind("slab:", 0) == 0) {
    std::stringstream ss(cfg.medium_map.substr(5));
    std::string med, center, thickness;
    if (!std::getline(ss, med, ':') || !std::getline(ss, center, ':') ||
        !std::getline(ss, thickness, ':'))
      throw std::invalid_argument(
          "medium-map slab spec must be slab:<medium>:<center_m>:<thickness_m>");
    return fus::slab_map(grid, background, resolve_medium(med), std::stod(center),
                         std::stod(thickness));
  }
  return fus::load_medium_map(cfg.medium_map, background);
}

void write_timing_table(const std::string& csv_path, const std::vector<fus::StageTiming>& rows) {
  std::vector<std::vector<double>> data;
  for (const auto& r : rows)
    data.push_back({double(r.harmonic), double(r.voxels), r.meshing_s, r.interpolation_s,
                    r.kernel_s, r.potential_s});
  fus::write_csv(csv_path,
                 {"harmonic", "n_voxels", "meshing_s", "interpolation_s", "evaluate_Gk_s",
                  "compute_p_s"},
                 data);

  std::cout << std::left << std::setw(6) << "p_i" << std::setw(14) << "N voxels" << std::setw(12)
            << "Meshing" << std::setw(16) << "Interpolation" << std::setw(16) << "Evaluate G_ki"
            << std::setw(12) << "Compute p_i" << '\n';
  for (const auto& r : rows)
    std::cout << std::left << "p" << std::setw(5) << r.harmonic << std::setw(14)
              << double(r.voxels) << std::setw(12) << r.meshing_s << std::setw(16)
              << r.interpolation_s << std::setw(16) << r.kernel_s << std::setw(12)
              << r.potential_s << '\n';
}

int cmd_simulate(const RunConfig& cfg) {
  // Resolve everything before touching the output directory so config
  // errors leave no partial outputs.
  const fus::Medium medium = resolve_medium(cfg.medium);
  const fus::BowlTransducer trans = resolve_transducer(cfg);
  if (cfg.mode != "homogeneous" && cfg.mode != "vie")
    throw CLI::ValidationError("--mode must be homogeneous or vie");
  if (cfg.n_harmonics < 1) throw CLI::ValidationError("--harmonics must be >= 1");

  fus::CascadeResult result;
  fus::MeshPlan plan;
  if (cfg.n_harmonics == 1) {
    const fus::DomainBox d2 = fus::reference_domain(trans, cfg.d);
    const fus::VoxelGrid grid =
        fus::make_grid(d2, medium.c0 / trans.f0 / cfg.n_w, 1, trans.focus());
    fus::SourceField src = fus::evaluate_source_field(trans, medium, grid);
    result.harmonics.push_back(std::move(src.field));
    result.source_normalization = src.normalization;
  } else {
    plan = fus::plan_nested_meshes(trans, medium, cfg.d, cfg.n_w, cfg.n_harmonics,
                                   cfg.width_scale);
    fus::CascadeConfig cc{medium, trans, plan, cfg.n_harmonics};
    if (cfg.mode == "vie") {
      if (cfg.medium_map.empty())
        throw CLI::ValidationError("--mode vie requires --medium-map");
      const fus::MediumMap map = resolve_medium_map(cfg, medium, plan.for_harmonic(2).grid);
      result = fus::run_cascade_inhomogeneous(cc, map);
    } else {
      result = fus::run_cascade(cc);
    }
  }

  fs::create_directories(cfg.out);
  for (const auto& field : result.harmonics) {
    const int n = field.wavenumber.harmonic;
    const fus::OnAxisProfile prof = fus::extract_on_axis(field);
    fus::write_on_axis_csv(cfg.out + "/onaxis_p" + std::to_string(n) + ".csv", prof.x, prof.p);
    if (cfg.dump_fields)
      fus::write_field_dump(cfg.out + "/p" + std::to_string(n) + ".bin", field);
  }
  if (cfg.n_harmonics >= 2) {
    std::ofstream(cfg.out + "/meshplan.txt") << plan.report();
    write_timing_table(cfg.out + "/timings.csv", result.timings);
  }
  std::ofstream(cfg.out + "/manifest.json") << json(cfg).dump(2) << '\n';
  std::cout << "wrote " << result.harmonics.size() << " harmonic(s) to " << cfg.out << '\n';
  return 0;
}

int cmd_plan(const RunConfig& cfg) {
  const fus::Medium medium = resolve_medium(cfg.medium);
  const fus::BowlTransducer trans = resolve_transducer(cfg);
  const fus::MeshPlan plan =
      fus::plan_nested_meshes(trans, medium, cfg.d, cfg.n_w, cfg.n_harmonics, cfg.width_scale);
  std::cout << plan.report();
  return 0;
}

int cmd_converge(const RunConfig& cfg, const std::string& study, std::vector<int> nw_values,
                 int nw_ref, double length, double width, std::vector<double> levels,
                 bool q0_mode) {
  const fus::Medium medium = resolve_medium(cfg.medium);
  const fus::BowlTransducer trans = resolve_transducer(cfg);

  std::vector<std::vector<double>> rows;
  std::vector<fus::ConvergenceRecord> records;
  if (study == "quadrature") {
    fus::DomainBox box;
    const Eigen::Vector3d focus = trans.focus();
    box.lo = {focus.x() - length / 2, -width / 2, -width / 2};
    box.hi = {focus.x() + length / 2, width / 2, width / 2};
    const fus::QuadratureStudy qs =
        fus::quadrature_convergence_study(trans, medium, box, nw_values, nw_ref);
    records = qs.records;
    std::cout << "fitted log-log slope: " << qs.slope << '\n';
  } else if (study == "domain") {
    const fus::MeshPlan plan =
        fus::plan_full_domain(trans, medium, cfg.d, cfg.n_w, cfg.n_harmonics, cfg.width_scale);
    fus::CascadeConfig cc{medium, trans, plan, cfg.n_harmonics};
    const fus::CascadeResult reference = fus::run_cascade(cc);
    records = fus::domain_shrink_study(cc, reference, levels, q0_mode);
  } else {
    throw CLI::ValidationError("--study must be quadrature or domain");
  }

  fs::create_directories(cfg.out);
  for (const auto& r : records) rows.push_back({double(r.harmonic), r.value, r.error_percent});
  const std::string control = records.empty() ? "value" : records.front().control;
  fus::write_csv(cfg.out + "/convergence.csv", {"harmonic", control, "error_percent"}, rows);
  for (const auto& r : records)
    std::cout << "p" << r.harmonic << "  " << r.control << " = " << r.value << "  error = "
              << r.error_percent << " %\n";
  return 0;
}

int cmd_validate() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << '\n';
    if (!ok) ++failures;
  };

  const fus::Medium water = fus::medium_preset("water");
  const fus::Wavenumber k1 = fus::complex_wavenumber(water, 1.1e6, 1);
  const fus::Wavenumber k3 = fus::complex_wavenumber(water, 1.1e6, 3);
  check("Re(k_n) = n Re(k_1)", std::abs(k3.k.real() - 3 * k1.k.real()) < 1e-9 * k3.k.real());
  check("Im(k_n)/Im(k_1) = n^eta",
        std::abs(k3.k.imag() / k1.k.imag() - std::pow(3.0, water.eta)) < 1e-9);

  const auto pts = fus::distribute_points(35e-3, 16.5e-3, 512);
  bool on_sphere = pts.size() == 512;
  for (const auto& p : pts)
    on_sphere = on_sphere && std::abs((p - Eigen::Vector3d(35e-3, 0, 0)).norm() - 35e-3) < 1e-12;
  check("cap points on the focal sphere", on_sphere);

  fus::DomainBox box{{0, 0, 0}, {8e-3, 7e-3, 6e-3}};
  const fus::VoxelGrid grid = fus::make_grid(box, 1e-3, 2);
  Eigen::VectorXcd f = Eigen::VectorXcd::Random(grid.count());
  const fus::GreenKernel kernel(grid, k1);
  const Eigen::VectorXcd u_fft = kernel.apply(f);
  const Eigen::VectorXcd u_dir = fus::direct_potential_oracle(k1, grid, f);
  check("FFT convolution matches direct summation",
        (u_fft - u_dir).cwiseAbs().maxCoeff() < 1e-12 * u_dir.cwiseAbs().maxCoeff());

  fus::HarmonicField hf{grid, Eigen::VectorXcd::Constant(grid.count(), 2.5), k1};
  const fus::HarmonicField hi = fus::interpolate(hf, grid);
  check("interpolation is the identity on the same grid",
        (hi.values - hf.values).cwiseAbs().maxCoeff() == 0.0);

  std::cout << (failures == 0 ? "all checks passed\n" : "some checks FAILED\n");
  return failures == 0 ? 0 : kExitRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly nonlinear focused-ultrasound harmonics via FFT volume potentials"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string manifest_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--transducer", cfg.transducer, "preset (H101, H131) or config file");
    sub->add_option("--medium", cfg.medium, "preset (water, liver, kidney) or config file");
    sub->add_option("--power", cfg.power, "radiated power, W");
    sub->add_option("--f0", cfg.f0_override, "override operating frequency, Hz");
    sub->add_option("--harmonics", cfg.n_harmonics, "number of harmonics");
    sub->add_option("--nw", cfg.n_w, "voxels per wavelength");
    sub->add_option("--d", cfg.d, "post-focal distance, m");
    sub->add_option("--np", cfg.n_points, "monopole sources on the bowl");
    sub->add_option("--width-scale", cfg.width_scale, "transverse scale of the D2 domain");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--threads", cfg.threads, "thread count (overrides FUS_THREADS)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run the harmonic cascade");
  add_common(sim);
  sim->add_option("--mode", cfg.mode, "homogeneous or vie");
  sim->add_option("--medium-map", cfg.medium_map,
                  "vie mode: map header file or slab:<medium>:<center_m>:<thickness_m>");
  sim->add_flag("--dump-fields", cfg.dump_fields, "write raw 3D field dumps");
  sim->add_option("--manifest", manifest_path, "load a previously emitted manifest");

  CLI::App* plan = app.add_subcommand("plan", "print the nested-mesh plan");
  add_common(plan);

  CLI::App* conv = app.add_subcommand("converge", "run a convergence study");
  add_common(conv);
  std::string study = "quadrature";
  std::vector<int> nw_values{4, 6, 8, 10};
  int nw_ref = 20;
  double length = 20e-3, width = 4e-3;
  std::vector<double> levels{1.0, 0.8, 0.6, 0.4, 0.2};
  bool q0_mode = false;
  conv->add_option("--study", study, "quadrature or domain");
  conv->add_option("--nw-list", nw_values, "n_w values (quadrature study)");
  conv->add_option("--nw-ref", nw_ref, "reference n_w (quadrature study)");
  conv->add_option("--length", length, "study domain length about the focus, m");
  conv->add_option("--width", width, "study domain width, m");
  conv->add_option("--levels", levels, "shrink levels (fractions, or Q0 with --q0)");
  conv->add_flag("--q0", q0_mode, "interpret levels as Q0 thresholds");

  app.add_subcommand("validate", "run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      if (!in) throw CLI::ValidationError("cannot open manifest '" + manifest_path + "'");
      json j;
      in >> j;
      cfg = j.get<RunConfig>();
    }
    apply_threads(cfg.threads);

    if (sim->parsed()) return cmd_simulate(cfg);
    if (plan->parsed()) return cmd_plan(cfg);
    if (conv->parsed())
      return cmd_converge(cfg, study, nw_values, nw_ref, length, width, levels, q0_mode);
    return cmd_validate();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}
