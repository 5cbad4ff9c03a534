#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "coldcc/channels.hpp"
#include "coldcc/experiments.hpp"

// Plot-ready CSV and JSON renderings. Numbers are written as %.9e (ten
// significant digits); rows follow the order of the inputs, so identical
// runs give identical bytes.

namespace coldcc::output {

std::string number(double x);

/// One CSV field, quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view text);
std::string csv_row(const std::vector<std::string>& fields);

/// Columns: energy(K), lambda, model, entrance, exit, sigma(cm^2), rate(cm^3/s).
/// Each point gives one row per exit plus an "inelastic_total" row.
std::string rates_csv(const std::vector<experiments::RateTable>& tables);
std::string rates_csv(const std::vector<experiments::ScanResult>& scans);

/// Per-point convergence diagnostics.
std::string convergence_csv(const std::vector<experiments::RateTable>& tables);
std::string convergence_csv(const std::vector<experiments::ScanResult>& scans);

/// JSON mirror: the rate rows, a convergence block per point and run metadata.
std::string rates_json(const std::vector<experiments::RateTable>& tables);
std::string scan_json(const std::vector<experiments::ScanResult>& scans,
                      const std::vector<experiments::PoleSearch>& poles = {});
/// Per-lambda scattering length and bound-state count.
std::string scan_lengths_csv(const std::vector<experiments::ScanResult>& scans);

std::string comparison_csv(const experiments::ModelComparison& cmp);
std::string comparison_json(const experiments::ModelComparison& cmp);

struct LevelRow {
  std::string model;
  int v;
  int N;
  int J;
  double energy_K;
  double dominant_weight;
};
std::vector<LevelRow> level_rows(const std::string& model, const molecule::MolecularStructure& structure);
std::string levels_csv(const std::vector<LevelRow>& rows);
std::string levels_json(const std::vector<LevelRow>& rows);

/// Columns R(bohr) then one per adiabat; the header labels each curve by the
/// dominant channel at the last R.
std::string adiabats_csv(const channels::CouplingMatrix& W, const std::vector<channels::AdiabatPoint>& curves);
std::string adiabats_json(const channels::CouplingMatrix& W, const std::vector<channels::AdiabatPoint>& curves,
                          double lambda);

/// Writes through a temporary file and renames, so readers never see a partial file.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace coldcc::output
