#include <cstdint>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusterfb/commands.hpp"

namespace {

std::vector<int> parse_k_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        int k = 0;
        try {
            k = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (tok.empty() || pos != tok.size())
            throw std::invalid_argument("--k-list entry is not an integer: " + tok);
        out.push_back(k);
    }
    if (out.empty()) throw std::invalid_argument("--k-list needs at least one entry");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feedback-reduction simulator for a multiuser MIMO downlink"};
    app.require_subcommand(1);

    std::string config_path, out_dir, k_list;
    std::uint64_t seed = 0;
    long drops = 0;

    auto* opt_config = app.add_option("--config", config_path, "JSON config file");
    auto* opt_out = app.add_option("--out", out_dir, "output directory for simulate");
    auto* opt_seed = app.add_option("--seed", seed, "master seed override");
    auto* opt_drops =
        app.add_option("--drops", drops, "Monte Carlo drops override")->check(CLI::PositiveNumber);
    auto* opt_klist = app.add_option("--k-list", k_list, "comma-separated user counts to sweep");

    CLI::App* sub_thr =
        app.add_subcommand("thresholds", "print cluster membership, thresholds, and loss bounds");
    CLI::App* sub_sim =
        app.add_subcommand("simulate", "run the Monte Carlo sweep and write results.csv");
    CLI::App* sub_bit =
        app.add_subcommand("bitalloc", "print the optimal quantization-bit allocation");
    for (CLI::App* s : {sub_thr, sub_sim, sub_bit}) s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        clusterfb::ExperimentConfig cfg = opt_config->count()
                                              ? clusterfb::load_config(config_path)
                                              : clusterfb::default_config();
        if (opt_seed->count()) cfg.run.seed = seed;
        if (opt_drops->count()) cfg.run.n_drops = drops;
        if (opt_out->count()) cfg.run.out_dir = out_dir;
        if (opt_klist->count()) {
            cfg.run.k_sweep = parse_k_list(k_list);
            for (int k : cfg.run.k_sweep)
                if (k < 1) throw std::invalid_argument("--k-list entries must be >= 1");
            if (cfg.variances.explicit_list)
                throw std::invalid_argument(
                    "--k-list requires drawn channel variances, not an explicit list");
        }

        if (sub_thr->parsed()) return clusterfb::cmd_thresholds(cfg, std::cout);
        if (sub_sim->parsed()) return clusterfb::cmd_simulate(cfg, std::cout);
        if (sub_bit->parsed()) return clusterfb::cmd_bitalloc(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
