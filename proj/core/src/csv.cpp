#include "ehtx/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ehtx/errors.hpp"

namespace ehtx {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> summary_cells(const PolicyResult& p) {
  return {to_string(p.id), format_number(p.mean_rate_bps), format_number(p.std_rate_bps),
          format_number(p.runtime_norm_s)};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ValidationError("not a number: '" + s + "'");
  return v;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size()) throw std::logic_error("CSV row width differs from the header");
  rows.push_back(std::move(cells));
}

void write_csv(const CsvTable& t, std::ostream& os) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("CSV input is empty");
  t.header = split_line(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size())
      throw ValidationError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable summary_table(const ExperimentResult& res, const std::vector<std::string>& lead_names,
                       const std::vector<std::string>& lead_values) {
  CsvTable t;
  t.header = lead_names;
  for (const auto& h : split_line(kSummaryHeader)) t.header.push_back(h);
  append_summary(t, res, lead_values);
  return t;
}

void append_summary(CsvTable& t, const ExperimentResult& res, const std::vector<std::string>& lead_values) {
  for (const PolicyResult& p : res.policies) {
    std::vector<std::string> cells = lead_values;
    for (auto& c : summary_cells(p)) cells.push_back(std::move(c));
    t.add_row(std::move(cells));
  }
}

CsvTable frame_table(const PolicyResult& p) {
  CsvTable t;
  t.header = split_line(kFrameHeader);
  for (const FrameRow& r : p.frames)
    t.add_row({std::to_string(r.trial), std::to_string(r.frame), format_number(r.decision.rho),
               format_number(r.decision.alpha_a), format_number(r.decision.alpha_b), format_number(r.decision.d_b),
               format_number(r.e_b), format_number(r.residual), format_number(r.rate_bps)});
  return t;
}

void write_csv_file(const CsvTable& t, const std::string& path) {
  if (path == "-") {
    write_csv(t, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(t, out);
  out.close();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void emit_csv(const ExperimentResult& res, const std::string& path) { write_csv_file(summary_table(res), path); }

ExperimentResult parse_summary_csv(std::istream& is) {
  const CsvTable t = read_csv(is);
  if (t.header != split_line(kSummaryHeader)) throw ValidationError("not a summary CSV: unexpected header");
  ExperimentResult res;
  for (const auto& r : t.rows) {
    PolicyResult p;
    p.id = parse_policy(r[0]);
    p.mean_rate_bps = parse_number(r[1]);
    p.std_rate_bps = parse_number(r[2]);
    p.runtime_norm_s = parse_number(r[3]);
    p.fitted_ratio = std::nan("");
    res.policies.push_back(std::move(p));
  }
  return res;
}

}  // namespace ehtx
