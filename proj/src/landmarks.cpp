#include "morphcloud/landmarks.hpp"

#include <fstream>

#include "morphcloud/csv.hpp"
#include "morphcloud/errors.hpp"

namespace morphcloud {

LandmarkSet augment_landmarks(const LandmarkSet& facial, const CanonicalView& view) {
    if (facial.size() != kFacialLandmarks)
        throw Error(Errc::WrongLandmarkCount,
                    "expected 68 facial landmarks, got " + std::to_string(facial.size()));
    double w = view.width - 1;
    double h = view.height - 1;
    LandmarkSet out = facial;
    out.pts.push_back({0, 0});
    out.pts.push_back({w, 0});
    out.pts.push_back({w, h});
    out.pts.push_back({0, h});
    out.pts.push_back({w / 2.0, 0});
    out.pts.push_back({w, h / 2.0});
    out.pts.push_back({w / 2.0, h});
    out.pts.push_back({0, h / 2.0});
    return out;
}

LandmarkSet load_landmarks(const std::string& path, const CanonicalView& view) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");

    LandmarkSet lm;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.empty()) continue; // blank line
        if (cells.size() != 2)
            throw Error(Errc::MalformedCsv, path + ":" + std::to_string(lineno) +
                                                ": expected 'x,y', got " +
                                                std::to_string(cells.size()) + " fields");
        double x = parse_csv_number(cells[0], path, lineno);
        double y = parse_csv_number(cells[1], path, lineno);
        if (lm.pts.size() >= kFacialLandmarks)
            throw Error(Errc::WrongLandmarkCount,
                        path + ": more than 68 landmark rows");
        if (x < 0.0 || x > view.width - 1 || y < 0.0 || y > view.height - 1)
            throw Error(Errc::OutOfBounds, path + ":" + std::to_string(lineno) +
                                               ": landmark outside the view frame");
        lm.pts.push_back({x, y});
    }
    if (lm.pts.size() != kFacialLandmarks)
        throw Error(Errc::WrongLandmarkCount, path + ": expected 68 landmark rows, got " +
                                                  std::to_string(lm.pts.size()));
    return augment_landmarks(lm, view);
}

LandmarkSet blend_landmarks(const LandmarkSet& a, const LandmarkSet& b, double alpha) {
    if (a.size() != b.size())
        throw Error(Errc::CountMismatch, "landmark sets have different sizes");
    LandmarkSet out;
    out.pts.resize(a.size());
    double beta = 1.0 - alpha;
    for (size_t i = 0; i < a.size(); ++i)
        out.pts[i] = {alpha * a.pts[i].x + beta * b.pts[i].x,
                      alpha * a.pts[i].y + beta * b.pts[i].y};
    return out;
}

} // namespace morphcloud
