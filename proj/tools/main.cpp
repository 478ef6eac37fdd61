#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "distrep/error.hpp"

namespace {

int report_error(std::string_view code, std::string_view message, int exit_code) {
  nlohmann::json record{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << record.dump() << '\n';
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distrep: bivariate normal object representations"};
  app.require_subcommand(1);
  distrep::cli::register_commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 2);
  } catch (const distrep::Error& e) {
    return report_error(distrep::to_string(e.code()), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 1);
  }
  return 0;
}
