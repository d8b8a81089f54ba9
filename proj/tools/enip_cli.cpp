#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "enip/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

std::string frame_name(std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.%s", k, ext);
  return buf;
}

void flush_snapshots(const enip::CaseSetup& setup, const enip::RunResult& result, const fs::path& out) {
  const auto& cfg = setup.config;
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const auto& snap = result.snapshots[k];
    const auto rows = enip::snapshot_rows(cfg.grid, snap.cells, cfg.materials, cfg.mode, &cfg.velocity, snap.time);
    enip::write_snapshot(rows, cfg.grid, out / frame_name(k, "csv"), enip::SnapshotFormat::CSV);
    enip::write_snapshot(rows, cfg.grid, out / frame_name(k, "vtk"), enip::SnapshotFormat::Grid);
  }
  enip::write_ledger(result.ledger, out / "ledger.csv");
}

void print_table(const enip::ConvergenceTable& table) {
  std::printf("%12s %14s %14s\n", "dx", "L1", "L2");
  for (const auto& r : table.rows) std::printf("%12.6f %14.6e %14.6e\n", r.dx, r.l1, r.l2);
  if (table.slope_l2) {
    std::printf("L2 slope: %.4f\n", *table.slope_l2);
  } else {
    std::printf("L2 slope: degenerate\n");
  }
  if (table.slope_l1) {
    std::printf("L1 slope: %.4f\n", *table.slope_l1);
  } else {
    std::printf("L1 slope: degenerate\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-material Eulerian solver with NIP/ENIP interface methods"};
  std::optional<std::string> case_name;
  std::optional<std::string> config_path;
  std::optional<int> nx;
  std::optional<int> ny;
  std::optional<double> cfl;
  std::optional<std::string> reconstruction;
  std::optional<double> t_end;
  std::optional<std::string> mode;
  std::optional<double> snapshot_every;
  std::string out_dir = "out";
  bool convergence = false;

  app.add_option("--case", case_name, "square_advection | rotation | free_drop | sod");
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--nx", nx, "cells along x");
  app.add_option("--ny", ny, "cells along y");
  app.add_option("--cfl", cfl, "CFL number (default 0.45)");
  app.add_option("--reconstruction", reconstruction, "nip | enip (default enip)");
  app.add_option("--tend", t_end, "final time in seconds");
  app.add_option("--mode", mode, "hydro | advection");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--snapshot-every", snapshot_every, "snapshot cadence in simulated seconds");
  app.add_flag("--convergence", convergence, "run the advection mesh ladder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  enip::Settings settings;
  try {
    enip::KeyValues file;
    if (config_path) file = enip::read_config_file(*config_path);
    enip::KeyValues flags;
    auto put = [&](const char* key, const std::string& v) { flags.emplace_back(key, v); };
    auto num = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    if (case_name) put("case", *case_name);
    if (nx) put("nx", std::to_string(*nx));
    if (ny) put("ny", std::to_string(*ny));
    if (cfl) put("cfl", num(*cfl));
    if (reconstruction) put("reconstruction", *reconstruction);
    if (t_end) put("tend", num(*t_end));
    if (mode) put("mode", *mode);
    if (snapshot_every) put("snapshot_every", num(*snapshot_every));
    settings = enip::resolve_settings(file, flags);
    if (convergence && settings.name != enip::CaseName::SquareAdvection) {
      throw enip::ConfigError("--convergence requires --case square_advection");
    }
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (convergence) {
      const auto ladder = enip::advection_mesh_ladder();
      const auto table = enip::convergence_study(settings, ladder, settings.reconstruction);
      print_table(table);
      enip::write_convergence(table, fs::path(out_dir) / "convergence.csv");
      if (table.failure) {
        std::cerr << "numerical failure: " << *table.failure << '\n';
        return kNumericalFailure;
      }
      return kOk;
    }

    enip::CaseSetup setup = enip::make_case(settings);
    const enip::RunResult result = enip::run(setup.config, setup.initial);
    flush_snapshots(setup, result, out_dir);
    std::printf("case %s: %d steps, t = %.9g, %zu snapshots in %s\n", enip::to_string(settings.name).c_str(),
                result.steps, result.final_world.time, result.snapshots.size(), out_dir.c_str());
    if (result.failure) {
      std::cerr << "numerical failure: " << *result.failure << '\n';
      return kNumericalFailure;
    }
    if (settings.name == enip::CaseName::SquareAdvection || settings.name == enip::CaseName::Rotation) {
      const auto& w = result.final_world;
      const auto rho = enip::density_field(w.cells);
      const auto exact = enip::exact_density(settings, w.grid, w.time);
      std::printf("L1 = %.6e  L2 = %.6e\n", enip::error_norm(rho, exact, 1), enip::error_norm(rho, exact, 2));
    }
  } catch (const enip::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
