// Command-line front end: regenerates the channel feasibility data
// (noise-vs-transmittance sweeps, Fock-probability trajectories, Wigner grids)
// for the built-in experimental presets or explicit parameters.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omch/config.hpp"
#include "omch/errors.hpp"
#include "omch/sweep.hpp"

namespace {

struct CommonOptions {
    std::string preset;
    std::string config_path;
    std::string level;
    std::string out;
    int points = -1;
    std::vector<std::string> overrides;
    bool allow_out_of_range = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--preset", opts.preset, "experiment preset name (see `presets`)");
    cmd->add_option("--config", opts.config_path, "key = value configuration file");
    cmd->add_option("--level", opts.level, "fidelity level: adiabatic|rwa|full")
        ->check(CLI::IsMember({"adiabatic", "rwa", "full"}));
    cmd->add_option("--out", opts.out, "output file (or prefix for Wigner grids)");
    cmd->add_option("--points", opts.points, "samples per sweep family");
    cmd->add_option("--override", opts.overrides, "key=value override, repeatable");
    cmd->add_flag("--allow-out-of-range", opts.allow_out_of_range,
                  "permit durations beyond the preset limits");
}

omch::RunConfig make_config(const CommonOptions& opts) {
    std::vector<std::string> overrides = opts.overrides;
    if (!opts.level.empty()) overrides.push_back("level=" + opts.level);
    if (!opts.out.empty()) overrides.push_back("out=" + opts.out);
    if (opts.points > 0) overrides.push_back("points=" + std::to_string(opts.points));
    if (opts.allow_out_of_range) overrides.push_back("allow_out_of_range=true");
    return omch::build_run_config(opts.preset, opts.config_path, overrides);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulsed photon-phonon-photon channel sweeps"};
    app.require_subcommand(1);

    CommonOptions channel_opts, fig2_opts, fig3_opts, fig4_opts, boundary_opts;

    CLI::App* channel = app.add_subcommand("channel", "evaluate one configuration");
    add_common_options(channel, channel_opts);
    CLI::App* fig2 = app.add_subcommand("fig2", "noise-vs-transmittance sweep families");
    add_common_options(fig2, fig2_opts);
    CLI::App* fig3 = app.add_subcommand("fig3", "Fock-probability trajectories and boundary");
    add_common_options(fig3, fig3_opts);
    CLI::App* fig4 = app.add_subcommand("fig4", "Wigner grids around the threshold crossings");
    add_common_options(fig4, fig4_opts);
    CLI::App* boundary = app.add_subcommand("boundary", "non-Gaussianity boundary table");
    add_common_options(boundary, boundary_opts);
    app.add_subcommand("presets", "list the built-in parameter sets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (channel->parsed()) {
            omch::cmd_channel(make_config(channel_opts), std::cout);
        } else if (fig2->parsed()) {
            omch::cmd_fig2(make_config(fig2_opts), std::cout);
        } else if (fig3->parsed()) {
            omch::cmd_fig3(make_config(fig3_opts), std::cout);
        } else if (fig4->parsed()) {
            if (fig4_opts.preset.empty() && fig4_opts.config_path.empty())
                fig4_opts.preset = "electro_ockeloen";
            omch::cmd_fig4(make_config(fig4_opts), std::cout);
        } else if (boundary->parsed()) {
            omch::cmd_boundary(make_config(boundary_opts), std::cout);
        } else {
            omch::cmd_presets(std::cout);
        }
    } catch (const omch::SingularChannelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const omch::TruncationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const omch::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
