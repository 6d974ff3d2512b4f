#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "turtle/service.hpp"
#include "turtle/store.hpp"

int main(int argc, char** argv) {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data_dir = "turtle-data";
    turtle::service::Config cfg;

    CLI::App app{"Turtle Score HTTP service"};
    app.add_option("--host", host, "Listen address")->envname("TURTLE_HOST");
    app.add_option("--port", port, "Listen port")->envname("TURTLE_PORT");
    app.add_option("--data-dir", data_dir, "Data directory")->envname("TURTLE_DATA_DIR");
    app.add_option("--default-k", cfg.default_k, "Default result count")->envname("TURTLE_DEFAULT_K");
    app.add_option("--seed", cfg.seed, "Training seed")->envname("TURTLE_SEED");
    app.add_option("--ui-origin", cfg.ui_origin, "CORS origin for the web UI")->envname("TURTLE_UI_ORIGIN");
    CLI11_PARSE(app, argc, argv);

    try {
        turtle::store::Store store(data_dir);
        turtle::service::Service service(store, cfg);
        httplib::Server server;
        service.mount(server);
        std::cerr << "turtled: serving " << data_dir << " on " << host << ":" << port << "\n";
        if (!server.listen(host, port)) {
            std::cerr << "turtled: cannot listen on " << host << ":" << port << "\n";
            return 2;
        }
    } catch (const turtle::Error& e) {
        std::cerr << "turtled: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
