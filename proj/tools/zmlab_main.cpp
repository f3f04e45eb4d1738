// zmlab: spectral laboratory for zero modes of 2D Pauli-type operators,
// Berezin-Toeplitz spectra, and effective spectral-shift corridors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zmlab/commands.hpp"
#include "zmlab/config.hpp"
#include "zmlab/errors.hpp"
#include "zmlab/version.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw zmlab::ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config;
    std::string out = ".";
    int threads = 0;
    unsigned long seed = 12345;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "run configuration file")->required();
    cmd->add_option("--out", args.out, "output directory (created if missing)");
    cmd->add_option("--threads", args.threads, "worker threads, 0 = auto");
    cmd->add_option("--seed", args.seed, "seed for the randomized property checks");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zmlab: zero modes, Berezin-Toeplitz spectra, and spectral-shift corridors"};
    app.set_version_flag("--version", zmlab::version_string);
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* kernel = app.add_subcommand("kernel", "projection-kernel diagonal with bounds");
    CLI::App* toeplitz = app.add_subcommand("toeplitz", "counting function vs comparator");
    CLI::App* ssf = app.add_subcommand("ssf", "effective spectral-shift corridors");
    CLI::App* levinson = app.add_subcommand("levinson", "generalized Levinson ratio trend");
    CLI::App* ids = app.add_subcommand("ids", "constant-field integrated density of states");
    CLI::App* selfcheck = app.add_subcommand("selfcheck", "numerical verification battery");
    for (CLI::App* cmd : {kernel, toeplitz, ssf, levinson, ids, selfcheck}) add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const zmlab::RunConfig cfg = zmlab::parse_config(read_file(args.config));
        zmlab::cli::CliOptions opt;
        opt.out_dir = args.out;
        opt.threads = args.threads;
        opt.seed = args.seed;
        std::filesystem::create_directories(opt.out_dir);
        if (kernel->parsed()) return zmlab::cli::cmd_kernel(cfg, opt);
        if (toeplitz->parsed()) return zmlab::cli::cmd_toeplitz(cfg, opt);
        if (ssf->parsed()) return zmlab::cli::cmd_ssf(cfg, opt);
        if (levinson->parsed()) return zmlab::cli::cmd_levinson(cfg, opt);
        if (ids->parsed()) return zmlab::cli::cmd_ids(cfg, opt);
        if (selfcheck->parsed()) return zmlab::cli::cmd_selfcheck(cfg, opt);
    } catch (const zmlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const zmlab::SupportExceedsRadius& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const zmlab::EvaluationRadiusExceeded& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const zmlab::ConvergenceFailure& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    } catch (const zmlab::NearSingularGram& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
