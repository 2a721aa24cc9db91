#pragma once

#include <string>
#include <vector>

#include "causnet/harness.hpp"
#include "causnet/simulator.hpp"
#include "causnet/validation.hpp"

namespace causnet {

// Format a double with 6 significant digits (the CSV float convention).
std::string format_g6(double v);

// Panel as CSV with header t,v1,...,vp; full double precision.
void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel);

// Process spec as readable text: p/tau/seed lines, then one
// "coeff <lag> <row> <col> <value>" line per nonzero coefficient (lag >= 1).
void write_process_spec_text(const std::string& path, const ProcessSpec& spec);

// Directed edge list with header from,to.
void write_network_csv(const std::string& path, const CausalityNetwork& net);

// Sweep cells with the stable schema
// method,mode,q,gamma,pv,tp_rate,fp_over_n,fp_rate,sig_flag,n_replicates.
void write_cells_csv(const std::string& path, const std::vector<CellResult>& cells);
std::vector<CellResult> read_cells_csv(const std::string& path);

// ROC points with header method,mode,q,gamma,pv,fp_rate,tp_rate.
void write_roc_csv(const std::string& path, const std::vector<RocRow>& rows);

// Human-readable run report: timing, notes, config echo, warnings.
void write_report_text(const std::string& path, const RunReport& report);

// Single CSV row TP,FP,FN,TN,n,K,m,P (with its header line).
std::string format_confusion_row(const ConfusionCounts& counts, double hyper_p);
void write_confusion_csv(const std::string& path, const ConfusionCounts& counts,
                         double hyper_p);

}  // namespace causnet
