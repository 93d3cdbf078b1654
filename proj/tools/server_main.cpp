// duet-server: hosts sessions over HTTP.

#include "CLI11.hpp"
#include "httplib.h"

#include "duet/gateway.hpp"
#include "duet/service.hpp"

#include <csignal>
#include <iostream>

using namespace duet;

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serve storytelling sessions to coordinator and child clients"};
    std::string data_dir = "data", templates_dir, guidelines_dir = DUET_DEFAULT_GUIDELINES_DIR;
    std::string provider_config, transcript_path, listen_addr = "127.0.0.1:8080";
    app.add_option("--data-dir", data_dir, "Snapshot directory")->envname("DUET_DATA_DIR");
    app.add_option("--templates-dir", templates_dir, "Prompt templates overriding the built-in ones")
        ->envname("DUET_TEMPLATES_DIR");
    app.add_option("--guidelines-dir", guidelines_dir, "Guideline rule files")->envname("DUET_GUIDELINES_DIR");
    app.add_option("--provider-config", provider_config, "Provider config file")->envname("DUET_PROVIDER_CONFIG");
    app.add_option("--transcript", transcript_path, "Gateway transcript (replay source or record target)")
        ->envname("DUET_TRANSCRIPT");
    app.add_option("--listen-addr", listen_addr, "host:port")->envname("DUET_LISTEN_ADDR");
    CLI11_PARSE(app, argc, argv);

    try {
        gateway::ProviderConfig config;
        if (!provider_config.empty()) {
            config = gateway::ProviderConfig::load(provider_config);
        } else {
            config.apply_env_overrides();
        }
        std::unique_ptr<gateway::Gateway> gw;
        if (config.mode == gateway::GatewayMode::replay && transcript_path.empty()) {
            gw = std::make_unique<gateway::Gateway>(gateway::Transcript{});
        } else {
            gw = gateway::Gateway::from_config(config, transcript_path);
        }
        auto templates = gateway::TemplateLibrary::builtin();
        if (!templates_dir.empty()) templates.merge(gateway::TemplateLibrary::load_dir(templates_dir));
        const auto guidelines = characteristics::GuidelineSet::load_dir(guidelines_dir);

        service::Service svc({data_dir, {gw.get(), &templates, &guidelines, session::wall_clock()}});
        const auto restored = svc.load_data_dir();

        const auto colon = listen_addr.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--listen-addr must be host:port");
        const std::string host = listen_addr.substr(0, colon);
        const int port = std::stoi(listen_addr.substr(colon + 1));

        httplib::Server server;
        service::mount(server, svc);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "listening on " << host << ":" << port << " (" << gateway::to_string(gw->mode()) << " mode, "
                  << restored << " sessions restored)" << std::endl;
        if (!server.listen(host, port)) throw Error(ErrorCode::IoError, "cannot listen on " + listen_addr);
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
