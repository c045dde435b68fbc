#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ehtx/experiment.hpp"

namespace ehtx {

inline constexpr const char* kSummaryHeader = "policy,mean_rate_bps,std_rate_bps,runtime_norm_s";
inline constexpr const char* kFrameHeader = "trial,frame,rho,alpha_a,alpha_b,d_b_w,e_b_j,residual_j,rate_bps";

/// 12 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);
/// Inverse of format_number. Throws ValidationError on malformed text.
double parse_number(const std::string& s);

/// A header plus string cells, for sweeps and recipe outputs.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

void write_csv(const CsvTable& t, std::ostream& os);
CsvTable read_csv(std::istream& is);

/// Summary rows of `res`, one per policy, optionally prefixed by fixed
/// leading columns (used by sweeps).
CsvTable summary_table(const ExperimentResult& res, const std::vector<std::string>& lead_names = {},
                       const std::vector<std::string>& lead_values = {});
/// Appends the rows of `res` to a table built by summary_table with the same
/// lead column names.
void append_summary(CsvTable& t, const ExperimentResult& res, const std::vector<std::string>& lead_values);
CsvTable frame_table(const PolicyResult& p);

/// Writes the summary to `path` ("-" for stdout). Throws std::runtime_error
/// on I/O failure.
void emit_csv(const ExperimentResult& res, const std::string& path);
void write_csv_file(const CsvTable& t, const std::string& path);

/// Reads a summary file written by emit_csv; per-frame tables and trial
/// rates are not part of the file and come back empty.
ExperimentResult parse_summary_csv(std::istream& is);

}  // namespace ehtx
