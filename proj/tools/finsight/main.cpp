#include "cli_common.hpp"

#include "finsight/common/error.hpp"

#include <iostream>

using namespace finsight;

int main(int argc, char** argv) {
    CLI::App app{"finsight: catch-and-release fishing toolkit"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<cli::JsonConfig>());
    app.set_config("--config", "", "JSON file with option values; nested objects name subcommands");

    cli::Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
    app.add_flag("-v,--verbose", g.verbose, "More diagnostics on stderr");

    cli::add_augment(app, g);
    cli::add_regs(app, g);
    cli::add_ems(app, g);
    cli::add_bob(app, g);
    cli::add_engine(app, g);
    cli::add_replay(app, g);

    try {
        app.parse(argc, argv);
        return g.result;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::Exit::usage;
    } catch (const cli::CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << " (at byte " << e.position() << ")\n";
        return cli::Exit::data_error;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::Exit::data_error;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::Exit::usage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::Exit::io_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return cli::Exit::internal;
    }
}
