#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "specmarket/config.hpp"
#include "specmarket/experiments.hpp"
#include "specmarket/kesten.hpp"
#include "specmarket/model.hpp"

namespace specmarket {

enum class OutputFormat { csv, json, svg };

std::string_view to_string(OutputFormat format) noexcept;
std::optional<OutputFormat> parse_output_format(std::string_view text) noexcept;

inline constexpr std::string_view kPathCsvHeader = "t,p,r,d,d_e,v_e,r_e,n_I,n_II,news";

/// One row per period, shortest round-trip decimals.
std::string path_to_csv(const SimulationPath& path);

/// Reads path_to_csv output back. p0, seed and clamp flags are not stored
/// in the CSV and come back as zero.
SimulationPath path_from_csv(std::string_view text);

std::string path_to_json(const SimulationPath& path);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);  // one row per seed record

std::string ensemble_to_json(const EnsembleAlpha& ensemble);
std::string bubble_sweep_to_json(std::span<const BubbleCell> cells, const RunConfig& config);
std::string bubble_sweep_to_csv(std::span<const BubbleCell> cells);
std::string tail_fit_to_json(const TailFit& fit);
std::string crash_tail_to_json(const CrashTailResult& result, const ModelParams& session);
std::string kesten_root_to_json(const KestenRoot& root);
std::string acf_to_json(const AcfResult& acf);
std::string acf_to_csv(const AcfResult& acf);
std::string params_to_json(const ModelParams& params);

/// Writes text to file, creating parent directories. Throws DiagnosticError
/// when the destination cannot be written.
void write_text_file(const std::filesystem::path& file, std::string_view text);

std::string read_text_file(const std::filesystem::path& file);

/// Writes the path as CSV or JSON.
void export_path(const SimulationPath& path, OutputFormat format, const std::filesystem::path& file);

} // namespace specmarket
