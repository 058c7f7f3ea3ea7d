#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "pinsep/report.hpp"
#include "pinsep/selftest.hpp"

using namespace pinsep;

namespace {

long max_dim_default() {
    if (const char* env = std::getenv("PINSEP_MAX_DIM")) return std::atol(env);
    return 100000;
}

void emit(const Json& report, const std::string& format, bool with_timing, double seconds) {
    if (format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << render_text(report);
        if (with_timing) std::cout << "elapsed: " << seconds << " s\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinsep - exact classification of purely inseparable ring extensions over F_p"};
    app.require_subcommand(1);

    std::string file, leg = "A:C", format = "text", op, filter;
    int order = 1;
    bool force = false;
    long max_dim = max_dim_default();

    auto add_common = [&](CLI::App* sub, bool needs_file) {
        if (needs_file) sub->add_option("file", file, "input .pinsep document")->required();
        sub->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));
        sub->add_flag("--force", force, "override size thresholds");
        sub->add_option("--max-dim", max_dim, "dimension cap (env PINSEP_MAX_DIM)");
    };

    CLI::App* c_classify = app.add_subcommand("classify", "classify one extension leg");
    add_common(c_classify, true);
    c_classify->add_option("--leg", leg, "lower:upper, e.g. A:C");

    CLI::App* c_tower = app.add_subcommand("tower", "full tower report for A in B in C");
    add_common(c_tower, true);

    CLI::App* c_jb = app.add_subcommand("jb", "Jacobson-Bourbaki correspondence verification");
    add_common(c_jb, true);

    CLI::App* c_diff = app.add_subcommand("diff", "differential operator computations");
    add_common(c_diff, true);
    c_diff->add_option("--leg", leg, "lower:upper, e.g. k:C");
    c_diff->add_option("--order", order, "maximal operator order");
    c_diff->add_option("--op", op, "ext|res|basis|delta")->check(CLI::IsMember({"ext", "res", "basis", "delta"}));

    CLI::App* c_selftest = app.add_subcommand("selftest", "run the invariant suite over a corpus");
    c_selftest->add_option("corpus", file, "corpus directory or a single .pinsep file");
    c_selftest->add_option("--filter", filter, "property name substring");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto t0 = std::chrono::steady_clock::now();
        if (c_selftest->parsed()) {
            std::vector<std::string> files;
            std::string root = file.empty() ? "corpus" : file;
            namespace fs = std::filesystem;
            if (fs::is_directory(root)) {
                for (const auto& e : fs::directory_iterator(root))
                    if (e.path().extension() == ".pinsep") files.push_back(e.path().string());
                std::sort(files.begin(), files.end());
            } else {
                files.push_back(root);
            }
            if (files.empty()) fail_pre("selftest: no .pinsep files under " + root);
            SelftestResult R = run_selftest(files, filter, std::cout);
            std::cout << R.passed << " passed, " << R.failed << " failed\n";
            return R.failed ? 1 : 0;
        }
        InputDocument doc = load_document(file, static_cast<size_t>(max_dim));
        // task-file defaults, overridden by flags
        if (doc.task.count("leg")) {
            bool flag_given = (c_classify->parsed() && c_classify->count("--leg")) ||
                              (c_diff->parsed() && c_diff->count("--leg"));
            if (!flag_given) leg = doc.task.at("leg");
        }
        if (doc.task.count("order") && c_diff->parsed() && !c_diff->count("--order"))
            order = std::stoi(doc.task.at("order"));
        if (!doc.find_subring("A") && leg == "A:C") leg = "k:C";

        Json report;
        if (c_classify->parsed())
            report = cmd_classify(doc, leg, force, max_dim);
        else if (c_tower->parsed())
            report = cmd_tower(doc);
        else if (c_jb->parsed())
            report = cmd_jb(doc, max_dim);
        else if (c_diff->parsed())
            report = cmd_diff(doc, leg, order, op, force);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(report, format, format == "text", secs);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
