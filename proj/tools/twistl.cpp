#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistl/errors.hpp"
#include "twistl/lseries.hpp"
#include "twistl/oracle.hpp"
#include "twistl/verify.hpp"

using json = nlohmann::ordered_json;
using namespace twistl;

namespace {

struct CommonArgs {
    std::string form_spec = "delta";
    std::string char_spec;
    std::string split_spec = "auto";
    std::string s_spec = "0.5,0";
    double eps = 0.45;
    double gamma = 4.0;
    std::string output = "json";
    int threads = 0;
};

CuspForm parse_form(const std::string& spec) {
    if (spec == "delta") return make_delta(512);
    if (spec.rfind("maass:", 0) == 0) return load_maass(spec.substr(6));
    throw std::invalid_argument("form must be 'delta' or 'maass:<path>'");
}

DirichletCharacter parse_char(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("character must be 'q:label'");
    std::int64_t q = std::stoll(spec.substr(0, colon));
    std::int64_t label = std::stoll(spec.substr(colon + 1));
    return char_from_label(q, label);
}

cplx parse_s(const std::string& spec) {
    auto comma = spec.find(',');
    if (comma == std::string::npos) return {std::stod(spec), 0.0};
    return {std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
}

std::pair<std::int64_t, std::int64_t> parse_split(const std::string& spec, std::int64_t q) {
    if (spec == "auto") return auto_split(q);
    auto x = spec.find('x');
    if (x == std::string::npos) throw std::invalid_argument("split must be 'MxN' or 'auto'");
    std::int64_t M = std::stoll(spec.substr(0, x));
    std::int64_t N = std::stoll(spec.substr(x + 1));
    if (M * N != q) throw std::invalid_argument("split does not divide q");
    return {M, N};
}

json counters_json(const EvalCounter& c) {
    return json{{"lift_evals", c.lift_evals.load()},
                {"lift_deriv_evals", c.lift_derivative_evals.load()},
                {"char_evals", c.char_evals.load()}};
}

json config_json(const CommonArgs& a) {
    return json{{"form", a.form_spec}, {"char", a.char_spec}, {"split", a.split_spec},
                {"s", a.s_spec},       {"eps", a.eps},        {"gamma", a.gamma}};
}

void emit_value(const CommonArgs& args, cplx value, double err, const EvalCounter& counter) {
    if (args.output == "text") {
        std::printf("value = %.17g + %.17gi\nerr_estimate = %.3g\n", value.real(), value.imag(),
                    err);
        return;
    }
    json out{{"value_re", value.real()},
             {"value_im", value.imag()},
             {"err_estimate", err},
             {"counters", counters_json(counter)},
             {"config", config_json(args)}};
    std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twisted modular L-values via orbit sums"};
    app.require_subcommand(1);

    CommonArgs args;
    double t_arg = 0.0;
    int l_arg = 0;
    std::uint64_t seed = 1;
    std::string bench_qs = "36,216,1296,7776";
    std::string engine_name = "fast";

    auto add_common = [&](CLI::App* cmd, bool with_char = true) {
        cmd->add_option("--form", args.form_spec, "delta | maass:<path>");
        if (with_char) cmd->add_option("--char", args.char_spec, "q:label")->required();
        cmd->add_option("--split", args.split_spec, "MxN or auto");
        cmd->add_option("--s", args.s_spec, "re,im");
        cmd->add_option("--eps", args.eps);
        cmd->add_option("--gamma", args.gamma);
        cmd->add_option("--output", args.output, "json|csv|text");
        cmd->add_option("--threads", args.threads, "0 = all cores (TWISTL_THREADS overrides)");
    };

    auto* compute = app.add_subcommand("compute", "L(s, f x chi), orbit-sum engine");
    add_common(compute);
    auto* naive = app.add_subcommand("naive", "L(s, f x chi), direct-sum engine");
    add_common(naive);
    auto* oracle = app.add_subcommand("oracle", "L(s, f x chi) by per-j quadrature");
    add_common(oracle);
    auto* orbit = app.add_subcommand("orbit-sum", "twisted sums at given (t,l), both engines");
    add_common(orbit);
    orbit->add_option("--t", t_arg)->required();
    orbit->add_option("--l", l_arg);
    auto* gauss = app.add_subcommand("gauss", "Gauss sum tau(chi)");
    add_common(gauss);
    auto* verify = app.add_subcommand("verify", "invariant suite");
    verify->add_option("--seed", seed);
    verify->add_option("--output", args.output);
    auto* bench = app.add_subcommand("bench", "scaling report");
    bench->add_option("--form", args.form_spec);
    bench->add_option("--q", bench_qs, "comma-separated moduli");
    bench->add_option("--eps", args.eps);
    bench->add_option("--gamma", args.gamma);
    bench->add_option("--t", t_arg);
    bench->add_option("--l", l_arg);
    bench->add_option("--output", args.output);
    bench->add_option("--threads", args.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        EvalCounter counter;
        if (verify->parsed()) {
            auto results = run_verify(seed);
            std::cout << format_verify(results);
            for (const auto& r : results)
                if (!r.pass) return 3;
            return 0;
        }
        if (bench->parsed()) {
            CuspForm form = parse_form(args.form_spec);
            std::vector<std::pair<std::int64_t, std::int64_t>> splits;
            std::stringstream ss(bench_qs);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                std::int64_t q = std::stoll(tok);
                splits.push_back(split_near_sixth_root(q));
            }
            BenchConfig bcfg;
            bcfg.t = t_arg;
            bcfg.l = l_arg;
            bcfg.eps = args.eps;
            bcfg.gamma_prec = args.gamma;
            bcfg.threads = args.threads;
            BenchReport rep = scaling_report(form, splits, bcfg);
            if (args.output == "csv")
                std::cout << rep.to_csv();
            else
                std::cout << rep.to_json();
            return rep.passing() ? 0 : 3;
        }

        CuspForm form = parse_form(args.form_spec);
        DirichletCharacter chi = parse_char(args.char_spec);
        if (gauss->parsed()) {
            cplx tau = gauss_sum(chi);
            emit_value(args, tau, 1e-10 * std::sqrt(double(chi.modulus())), counter);
            return 0;
        }
        PrecisionConfig cfg;
        cfg.gamma_prec = args.gamma;
        cfg.eps = args.eps;
        cfg.s = parse_s(args.s_spec);
        if (orbit->parsed()) {
            auto [M, N] = parse_split(args.split_spec, chi.modulus());
            CharacterSplit split = split_character(chi, M, N);
            SumRequest req;
            req.form = &form;
            req.split = split;
            req.t = t_arg;
            req.l = l_arg;
            req.eps = args.eps;
            req.gamma_prec = std::max(8.0, args.gamma);
            req.threads = args.threads;
            FastResult fast = fast_orbit_sum(req, {}, &counter);
            cplx nv = naive_orbit_sum(form, chi, chi.modulus(), t_arg, l_arg, {}, &counter);
            double dev = std::abs(fast.value - nv) / (1.0 + std::abs(nv));
            if (args.output == "text") {
                std::printf("fast  = %.17g + %.17gi\nnaive = %.17g + %.17gi\nrel_dev = %.3g\n",
                            fast.value.real(), fast.value.imag(), nv.real(), nv.imag(), dev);
            } else {
                json out{{"value_re", fast.value.real()},
                         {"value_im", fast.value.imag()},
                         {"err_estimate", fast.max_residual},
                         {"naive_re", nv.real()},
                         {"naive_im", nv.imag()},
                         {"rel_dev", dev},
                         {"counters", counters_json(counter)},
                         {"config", config_json(args)}};
                std::cout << out.dump(2) << "\n";
            }
            return 0;
        }
        AssembleOptions opts;
        opts.threads = args.threads;
        if (compute->parsed() || naive->parsed()) {
            opts.engine = compute->parsed() ? Engine::fast : Engine::naive;
            if (opts.engine == Engine::fast && args.split_spec != "auto") {
                auto [M, N] = parse_split(args.split_spec, chi.modulus());
                opts.split_M = M;
                opts.split_N = N;
            }
            LValue lv = assemble_L(form, chi, cfg, opts, &counter);
            emit_value(args, lv.value, lv.err_estimate, counter);
            return 0;
        }
        if (oracle->parsed()) {
            LValue lv = direct_integral_L(form, chi, cfg.s, cfg.gamma_prec, &counter);
            emit_value(args, lv.value, lv.err_estimate, counter);
            return 0;
        }
    } catch (const ToleranceExceeded& e) {
        std::cerr << "tolerance exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
