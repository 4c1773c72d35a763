#include <iostream>
#include <string>
#include <vector>

#include <kaninj/commands.hpp>
#include <kaninj/workspace.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> workspace_files;
    std::vector<std::string> rest;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "-w" || a == "--workspace") {
            if (i + 1 == argc) {
                std::cerr << "error: " << a << " needs a file argument\n";
                return 2;
            }
            workspace_files.push_back(argv[++i]);
        } else {
            rest.push_back(std::move(a));
        }
    }
    try {
        kaninj::Workspace ws = kaninj::parse_workspace(workspace_files);
        kaninj::CommandResult r = kaninj::run_command(ws, rest);
        (r.exit_code == 2 ? std::cerr : std::cout) << r.output;
        return r.exit_code;
    } catch (const kaninj::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
