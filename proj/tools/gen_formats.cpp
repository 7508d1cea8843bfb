// Writes every builtin modulation format as a coordinate file
// (ax_re ax_im ay_re ay_im per line) into the given directory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nli4d/formats.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_formats <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
        return 2;
    }

    for (const auto& [label, make] : nli4d::formats::all()) {
        const auto c = make();
        const auto path = dir / (label + ".txt");
        std::ofstream out(path);
        if (!out) {
            std::cerr << "cannot write " << path << "\n";
            return 2;
        }
        out << "# name: " << label << "\n";
        out << "# columns: ax_re ax_im ay_re ay_im (unnormalized coordinates)\n";
        char buf[160];
        for (const auto& p : c.points) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n",
                          p.ax.real(), p.ax.imag(), p.ay.real(), p.ay.imag());
            out << buf;
        }
        if (!out) {
            std::cerr << "short write to " << path << "\n";
            return 2;
        }
        std::cout << path.string() << ": " << c.points.size() << " points\n";
    }
    return 0;
}
