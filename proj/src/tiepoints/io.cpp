#include "uwr/tiepoints.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace uwr::tiepoints {

void write_tiepoints(const TiePointSet& pts, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw TiePointError("cannot write " + path.string());
    f << "# xl yl xr yr inlier score\n" << std::setprecision(17);
    for (const auto& p : pts.pairs)
        f << p.left.x() << ' ' << p.left.y() << ' ' << p.right.x() << ' ' << p.right.y() << ' '
          << (p.inlier ? 1 : 0) << ' ' << p.score << '\n';
    if (!f) throw TiePointError("write failed: " + path.string());
}

TiePointSet read_tiepoints(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw TiePointError("cannot read " + path.string());
    TiePointSet out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream in(line);
        TiePoint p;
        int inlier = 1;
        double xl, yl, xr, yr;
        if (!(in >> xl >> yl >> xr >> yr))
            throw TiePointError(path.string() + ":" + std::to_string(lineno) + ": expected xl yl xr yr");
        // inlier flag and score are optional for hand-picked points
        if (in >> inlier) {
            if (inlier != 0 && inlier != 1)
                throw TiePointError(path.string() + ":" + std::to_string(lineno) + ": inlier must be 0 or 1");
            if (!(in >> p.score)) p.score = 1.0;
        }
        if (p.score < 0.0 || p.score > 1.0)
            throw TiePointError(path.string() + ":" + std::to_string(lineno) + ": score outside [0,1]");
        p.left = {xl, yl};
        p.right = {xr, yr};
        p.inlier = inlier == 1;
        out.pairs.push_back(p);
    }
    return out;
}

}  // namespace uwr::tiepoints
