#include "collage/cli/commands.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <future>

namespace collage::cli {

std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 9);
    return std::string(buf.data(), res.ptr);
}

namespace {

// Runs fn(item) for each item concurrently and returns results in input order.
template <class T, class Fn>
auto ordered_parallel(const std::vector<T>& items, Fn fn) {
    using R = std::invoke_result_t<Fn, const T&>;
    std::vector<std::future<R>> pending;
    pending.reserve(items.size());
    for (const T& item : items) pending.push_back(std::async(std::launch::async, fn, std::cref(item)));
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& p : pending) out.push_back(p.get());
    return out;
}

template <class Write>
void to_destination(const std::optional<std::string>& path, std::ostream& fallback, Write write) {
    if (!path) {
        write(fallback);
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + *path + "'");
    write(file);
    if (!file) throw std::runtime_error("failed writing '" + *path + "'");
}

}  // namespace

std::vector<ErrorReport> run_forward(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.spec.exact_u || !cfg.spec.exact_v)
        throw ConfigError("forward: exact_u and exact_v are required for the error columns");
    return ordered_parallel(cfg.m_list, [&cfg](const int& m) {
        return error_report(solve_forward(cfg.spec, m), cfg.spec);
    });
}

std::vector<InverseRow> run_inverse(const RunConfig& cfg) {
    cfg.validate();
    return ordered_parallel(cfg.targets, [&cfg](const int& m) {
        const GalerkinSolution target = solve_forward(cfg.spec, m);
        const ResidualModel model = build_residual(target, cfg.n, cfg.spec.f, cfg.spec.g);
        MinimizeSettings settings;
        settings.grid = cfg.grid;
        return InverseRow{m, cfg.n, cfg.mode, minimize(model, cfg.box, cfg.mode, settings)};
    });
}

void write_forward_csv(std::ostream& out, const std::vector<ErrorReport>& rows) {
    out << "m,err_u_L2,err_v_L2,err_du_L2,err_dv_L2,err_u_H1,err_v_H1\n";
    for (const ErrorReport& r : rows) {
        out << r.m << ',' << format_real(r.u.l2) << ',' << format_real(r.v.l2) << ','
            << format_real(r.u.slope_l2) << ',' << format_real(r.v.slope_l2) << ','
            << format_real(r.u.h1) << ',' << format_real(r.v.h1) << '\n';
    }
}

void write_inverse_csv(std::ostream& out, const std::vector<InverseRow>& rows) {
    out << "target_m,n,mode,lambda1_hat,lambda2_hat,objective_value\n";
    for (const InverseRow& r : rows) {
        out << r.target_m << ',' << r.n << ',' << to_string(r.mode) << ','
            << format_real(r.result.lambda.lambda1) << ',' << format_real(r.result.lambda.lambda2) << ','
            << format_real(r.result.value) << '\n';
    }
}

void write_plot_data(std::ostream& out, const RunConfig& cfg, int samples) {
    if (!cfg.spec.exact_u || !cfg.spec.exact_v)
        throw ConfigError("plot data needs exact_u and exact_v");
    const auto sols = ordered_parallel(cfg.m_list, [&cfg](const int& m) { return solve_forward(cfg.spec, m); });
    for (std::size_t s = 0; s < sols.size(); ++s) {
        if (s > 0) out << "\n\n";
        out << "# m = " << sols[s].m << "\n# x u_m v_m u v du_m dv_m\n";
        for (int i = 0; i < samples; ++i) {
            const double x = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
            const SolutionSample p = evaluate(sols[s], x);
            out << format_real(x) << ' ' << format_real(p.u) << ' ' << format_real(p.v) << ' '
                << format_real(cfg.spec.exact_u->evaluate(x)) << ' ' << format_real(cfg.spec.exact_v->evaluate(x))
                << ' ' << format_real(p.du) << ' ' << format_real(p.dv) << '\n';
        }
    }
}

void cmd_forward(const RunConfig& cfg, std::ostream& fallback) {
    const auto rows = run_forward(cfg);
    to_destination(cfg.out, fallback, [&](std::ostream& o) { write_forward_csv(o, rows); });
    if (cfg.plot) {
        std::ofstream file(*cfg.plot, std::ios::binary);
        if (!file) throw ConfigError("cannot open plot file '" + *cfg.plot + "'");
        write_plot_data(file, cfg);
    }
}

void cmd_inverse(const RunConfig& cfg, std::ostream& fallback) {
    const auto rows = run_inverse(cfg);
    to_destination(cfg.out, fallback, [&](std::ostream& o) { write_inverse_csv(o, rows); });
}

}  // namespace collage::cli
