#include "causnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace causnet {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw causnet_error("cannot open for writing: " + path);
  return out;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw invalid_argument_error(std::string("cells csv: bad ") + what + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw invalid_argument_error(std::string("cells csv: bad ") + what + " '" + s + "'");
  }
}

SigFlag parse_sig_flag(const std::string& s) {
  if (s.empty()) return SigFlag::none;
  if (s == "*") return SigFlag::star;
  if (s == "**") return SigFlag::double_star;
  throw invalid_argument_error("cells csv: bad sig_flag '" + s + "'");
}

constexpr const char* kCellsHeader =
    "method,mode,q,gamma,pv,tp_rate,fp_over_n,fp_rate,sig_flag,n_replicates";

}  // namespace

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel) {
  std::ofstream out = open_out(path);
  out << 't';
  for (int v = 1; v <= panel.data.cols(); ++v) out << ",v" << v;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.data.rows(); ++t) {
    out << t;
    for (Eigen::Index v = 0; v < panel.data.cols(); ++v)
      out << ',' << format_full(panel.data(t, v));
    out << '\n';
  }
}

void write_process_spec_text(const std::string& path, const ProcessSpec& spec) {
  std::ofstream out = open_out(path);
  out << "p " << spec.p << '\n';
  out << "tau " << spec.tau << '\n';
  out << "seed " << spec.seed << '\n';
  for (std::size_t l = 0; l < spec.coeffs.size(); ++l)
    for (int i = 0; i < spec.p; ++i)
      for (int j = 0; j < spec.p; ++j)
        if (spec.coeffs[l](i, j) != 0.0)
          out << "coeff " << (l + 1) << ' ' << i << ' ' << j << ' '
              << format_full(spec.coeffs[l](i, j)) << '\n';
}

void write_network_csv(const std::string& path, const CausalityNetwork& net) {
  std::ofstream out = open_out(path);
  out << "from,to\n";
  for (int i = 0; i < net.p; ++i)
    for (int j = 0; j < net.p; ++j)
      if (i != j && net.edge(i, j)) out << i << ',' << j << '\n';
}

void write_cells_csv(const std::string& path, const std::vector<CellResult>& cells) {
  std::ofstream out = open_out(path);
  out << kCellsHeader << '\n';
  for (const CellResult& c : cells) {
    out << method_name(c.method) << ',' << network_mode_name(c.mode) << ',' << c.q
        << ',' << format_g6(c.gamma) << ',' << format_g6(c.pv) << ','
        << format_g6(c.tp_rate) << ',' << format_g6(c.fp_over_n) << ','
        << format_g6(c.fp_rate) << ',' << sig_flag_name(c.sig_flag) << ','
        << c.n_replicates << '\n';
  }
}

std::vector<CellResult> read_cells_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw causnet_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw invalid_argument_error("cells csv: empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCellsHeader)
    throw invalid_argument_error("cells csv: unexpected header '" + line + "'");
  std::vector<CellResult> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 10)
      throw invalid_argument_error("cells csv: expected 10 fields, got " +
                                   std::to_string(f.size()) + " in '" + line + "'");
    CellResult c;
    c.method = parse_method(f[0]);
    c.mode = parse_network_mode(f[1]);
    c.q = parse_int(f[2], "q");
    c.gamma = parse_double(f[3], "gamma");
    c.pv = parse_double(f[4], "pv");
    c.tp_rate = parse_double(f[5], "tp_rate");
    c.fp_over_n = parse_double(f[6], "fp_over_n");
    c.fp_rate = parse_double(f[7], "fp_rate");
    c.sig_flag = parse_sig_flag(f[8]);
    c.n_replicates = parse_int(f[9], "n_replicates");
    cells.push_back(c);
  }
  return cells;
}

void write_roc_csv(const std::string& path, const std::vector<RocRow>& rows) {
  std::ofstream out = open_out(path);
  out << "method,mode,q,gamma,pv,fp_rate,tp_rate\n";
  for (const RocRow& r : rows) {
    out << method_name(r.method) << ',' << network_mode_name(r.mode) << ',' << r.q
        << ',' << format_g6(r.gamma) << ',' << format_g6(r.pv) << ','
        << format_g6(r.fp_rate) << ',' << format_g6(r.tp_rate) << '\n';
  }
}

void write_report_text(const std::string& path, const RunReport& report) {
  std::ofstream out = open_out(path);
  out << "# sweep report\n";
  out << "wall_seconds: " << format_g6(report.wall_seconds) << '\n';
  out << "cells: " << report.n_cells << '\n';
  out << "incomplete_cells: " << report.n_incomplete_cells << '\n';
  if (!report.notes.empty()) out << "notes: " << report.notes << '\n';
  out << "\n## config\n" << report.config_json << '\n';
  out << "\n## warnings (" << report.warnings.size() << ")\n";
  for (const std::string& w : report.warnings) out << "- " << w << '\n';
}

std::string format_confusion_row(const ConfusionCounts& counts, double hyper_p) {
  std::ostringstream out;
  out << counts.TP << ',' << counts.FP << ',' << counts.FN << ',' << counts.TN
      << ',' << counts.n() << ',' << counts.K() << ',' << counts.m() << ','
      << format_g6(hyper_p);
  return out.str();
}

void write_confusion_csv(const std::string& path, const ConfusionCounts& counts,
                         double hyper_p) {
  std::ofstream out = open_out(path);
  out << "TP,FP,FN,TN,n,K,m,P\n";
  out << format_confusion_row(counts, hyper_p) << '\n';
}

}  // namespace causnet
