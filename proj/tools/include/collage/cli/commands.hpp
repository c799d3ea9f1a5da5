#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "collage/cli/config.hpp"
#include "collage/forward.hpp"
#include "collage/inverse.hpp"

namespace collage::cli {

/// 9 significant digits, '.' decimal separator regardless of locale.
std::string format_real(double v);

struct InverseRow {
    int target_m = 0;
    int n = 0;
    ObjectiveMode mode = ObjectiveMode::l2;
    MinimizeResult result;
};

/// Forward solve + error report for every m in cfg.m_list, in list order.
std::vector<ErrorReport> run_forward(const RunConfig& cfg);

/// For every target m: forward solve at the configured lambdas, build the
/// residual with cfg.n test functions and minimise over cfg.box.
std::vector<InverseRow> run_inverse(const RunConfig& cfg);

void write_forward_csv(std::ostream& out, const std::vector<ErrorReport>& rows);
void write_inverse_csv(std::ostream& out, const std::vector<InverseRow>& rows);

/// gnuplot data: one block per m (separated by two blank lines) with columns
/// x u_m v_m u v du_m dv_m at `samples` uniform points of [0,1].
void write_plot_data(std::ostream& out, const RunConfig& cfg, int samples = 1024);

/// Runs the forward pipeline and writes the CSV to cfg.out (or `fallback`),
/// and plot data to cfg.plot when set.
void cmd_forward(const RunConfig& cfg, std::ostream& fallback);
void cmd_inverse(const RunConfig& cfg, std::ostream& fallback);

}  // namespace collage::cli
