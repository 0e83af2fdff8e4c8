#include "morphcloud/ply_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "morphcloud/errors.hpp"

namespace morphcloud {
namespace {

enum class PropType { I8, U8, I16, U16, I32, U32, F32, F64 };

size_t prop_size(PropType t) {
    switch (t) {
        case PropType::I8:
        case PropType::U8: return 1;
        case PropType::I16:
        case PropType::U16: return 2;
        case PropType::I32:
        case PropType::U32: return 4;
        case PropType::F32: return 4;
        case PropType::F64: return 8;
    }
    return 0;
}

bool parse_prop_type(const std::string& s, PropType& out) {
    if (s == "char" || s == "int8") out = PropType::I8;
    else if (s == "uchar" || s == "uint8") out = PropType::U8;
    else if (s == "short" || s == "int16") out = PropType::I16;
    else if (s == "ushort" || s == "uint16") out = PropType::U16;
    else if (s == "int" || s == "int32") out = PropType::I32;
    else if (s == "uint" || s == "uint32") out = PropType::U32;
    else if (s == "float" || s == "float32") out = PropType::F32;
    else if (s == "double" || s == "float64") out = PropType::F64;
    else return false;
    return true;
}

struct Property {
    std::string name;
    PropType type = PropType::F32;
};

struct Element {
    std::string name;
    size_t count = 0;
    std::vector<Property> props;
    bool has_list = false;
};

double read_binary_value(const uint8_t* p, PropType t) {
    switch (t) {
        case PropType::I8: {
            int8_t v;
            std::memcpy(&v, p, 1);
            return v;
        }
        case PropType::U8: {
            uint8_t v;
            std::memcpy(&v, p, 1);
            return v;
        }
        case PropType::I16: {
            int16_t v;
            std::memcpy(&v, p, 2);
            return v;
        }
        case PropType::U16: {
            uint16_t v;
            std::memcpy(&v, p, 2);
            return v;
        }
        case PropType::I32: {
            int32_t v;
            std::memcpy(&v, p, 4);
            return v;
        }
        case PropType::U32: {
            uint32_t v;
            std::memcpy(&v, p, 4);
            return v;
        }
        case PropType::F32: {
            float v;
            std::memcpy(&v, p, 4);
            return v;
        }
        case PropType::F64: {
            double v;
            std::memcpy(&v, p, 8);
            return v;
        }
    }
    return 0.0;
}

std::string chomp(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
}

} // namespace

ColoredPointCloud load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::MissingFile, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || chomp(line) != "ply")
        throw Error(Errc::MalformedPly, "missing 'ply' magic in '" + path + "'");

    bool binary = false;
    bool format_seen = false;
    std::vector<Element> elements;
    while (std::getline(in, line)) {
        std::istringstream ls(chomp(line));
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "comment" || tok == "obj_info") continue;
        if (tok == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw Error(Errc::MalformedPly, "unsupported format '" + fmt + "'");
            format_seen = true;
        } else if (tok == "element") {
            Element e;
            if (!(ls >> e.name >> e.count))
                throw Error(Errc::MalformedPly, "bad element line");
            elements.push_back(e);
        } else if (tok == "property") {
            if (elements.empty()) throw Error(Errc::MalformedPly, "property before element");
            std::string type_s;
            ls >> type_s;
            if (type_s == "list") {
                elements.back().has_list = true;
                continue;
            }
            Property p;
            if (!parse_prop_type(type_s, p.type))
                throw Error(Errc::MalformedPly, "unknown property type '" + type_s + "'");
            if (!(ls >> p.name)) throw Error(Errc::MalformedPly, "property without name");
            elements.back().props.push_back(p);
        } else if (tok == "end_header") {
            break;
        } else {
            throw Error(Errc::MalformedPly, "unexpected header token '" + tok + "'");
        }
    }
    if (!format_seen) throw Error(Errc::MalformedPly, "missing format line");

    size_t vertex_elem = elements.size();
    for (size_t i = 0; i < elements.size(); ++i)
        if (elements[i].name == "vertex") {
            vertex_elem = i;
            break;
        }
    if (vertex_elem == elements.size())
        throw Error(Errc::MalformedPly, "no vertex element");
    const Element& ve = elements[vertex_elem];
    if (ve.count == 0) throw Error(Errc::EmptyCloud, "vertex element has zero entries");
    if (ve.has_list)
        throw Error(Errc::MalformedPly, "list property on vertex element is unsupported");

    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (size_t i = 0; i < ve.props.size(); ++i) {
        const Property& p = ve.props[i];
        int idx = static_cast<int>(i);
        if (p.name == "x") ix = idx;
        else if (p.name == "y") iy = idx;
        else if (p.name == "z") iz = idx;
        else if (p.name == "red") ir = idx;
        else if (p.name == "green") ig = idx;
        else if (p.name == "blue") ib = idx;
    }
    if (ix < 0 || iy < 0 || iz < 0)
        throw Error(Errc::MalformedPly, "vertex element lacks x/y/z");
    for (int idx : {ix, iy, iz}) {
        PropType t = ve.props[static_cast<size_t>(idx)].type;
        if (t != PropType::F32 && t != PropType::F64)
            throw Error(Errc::MalformedPly, "coordinate property must be float32/float64");
    }
    if (ir < 0 || ig < 0 || ib < 0)
        throw Error(Errc::MissingColor, "vertex element lacks red/green/blue");
    for (int idx : {ir, ig, ib}) {
        if (ve.props[static_cast<size_t>(idx)].type != PropType::U8)
            throw Error(Errc::MalformedPly, "color property must be uint8");
    }

    // Skip any elements written before the vertices.
    for (size_t e = 0; e < vertex_elem; ++e) {
        const Element& el = elements[e];
        if (binary) {
            if (el.has_list)
                throw Error(Errc::MalformedPly,
                            "cannot skip binary list element '" + el.name + "' before vertices");
            size_t stride = 0;
            for (const Property& p : el.props) stride += prop_size(p.type);
            in.seekg(static_cast<std::streamoff>(stride * el.count), std::ios::cur);
        } else {
            for (size_t i = 0; i < el.count; ++i)
                if (!std::getline(in, line))
                    throw Error(Errc::MalformedPly, "truncated element '" + el.name + "'");
        }
    }

    ColoredPointCloud cloud;
    cloud.reserve(ve.count);

    auto check_color = [&](double v) {
        if (v < 0.0 || v > 255.0)
            throw Error(Errc::MalformedPly, "color component out of [0,255]");
        return static_cast<uint8_t>(v);
    };

    if (binary) {
        size_t stride = 0;
        std::vector<size_t> offsets(ve.props.size());
        for (size_t i = 0; i < ve.props.size(); ++i) {
            offsets[i] = stride;
            stride += prop_size(ve.props[i].type);
        }
        std::vector<uint8_t> buf(stride * ve.count);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<size_t>(in.gcount()) != buf.size())
            throw Error(Errc::MalformedPly, "truncated binary vertex data");
        for (size_t i = 0; i < ve.count; ++i) {
            const uint8_t* row = buf.data() + i * stride;
            auto get = [&](int idx) {
                const Property& p = ve.props[static_cast<size_t>(idx)];
                return read_binary_value(row + offsets[static_cast<size_t>(idx)], p.type);
            };
            Vec3d pt{get(ix), get(iy), get(iz)};
            Rgb c{check_color(get(ir)), check_color(get(ig)), check_color(get(ib))};
            cloud.push_back(pt, c);
        }
    } else {
        for (size_t i = 0; i < ve.count; ++i) {
            std::vector<double> vals(ve.props.size());
            for (size_t p = 0; p < ve.props.size(); ++p) {
                if (!(in >> vals[p]))
                    throw Error(Errc::MalformedPly, "truncated ascii vertex data at row " +
                                                        std::to_string(i));
                // float32 properties round through float so ascii and binary agree
                if (ve.props[p].type == PropType::F32)
                    vals[p] = static_cast<double>(static_cast<float>(vals[p]));
            }
            Vec3d pt{vals[static_cast<size_t>(ix)], vals[static_cast<size_t>(iy)],
                     vals[static_cast<size_t>(iz)]};
            auto color_at = [&](int idx) {
                double v = vals[static_cast<size_t>(idx)];
                if (v != static_cast<double>(static_cast<long long>(v)))
                    throw Error(Errc::MalformedPly, "non-integer color component");
                return check_color(v);
            };
            cloud.push_back(pt, Rgb{color_at(ir), color_at(ig), color_at(ib)});
        }
    }

    cloud.validate();
    return cloud;
}

void save_ply(const ColoredPointCloud& cloud, const std::string& path, PlyFormat format) {
    cloud.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");

    out << "ply\n";
    out << (format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                       : "format binary_little_endian 1.0\n");
    out << "element vertex " << cloud.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    if (format == PlyFormat::Ascii) {
        char buf[128];
        for (size_t i = 0; i < cloud.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %u %u %u\n",
                          static_cast<double>(static_cast<float>(cloud.x[i])),
                          static_cast<double>(static_cast<float>(cloud.y[i])),
                          static_cast<double>(static_cast<float>(cloud.z[i])),
                          cloud.color[i].r, cloud.color[i].g, cloud.color[i].b);
            out << buf;
        }
    } else {
        std::vector<uint8_t> row(15);
        for (size_t i = 0; i < cloud.size(); ++i) {
            float f[3] = {static_cast<float>(cloud.x[i]), static_cast<float>(cloud.y[i]),
                          static_cast<float>(cloud.z[i])};
            std::memcpy(row.data(), f, 12);
            row[12] = cloud.color[i].r;
            row[13] = cloud.color[i].g;
            row[14] = cloud.color[i].b;
            out.write(reinterpret_cast<const char*>(row.data()), 15);
        }
    }
    if (!out) throw Error(Errc::IoError, "failed while writing '" + path + "'");
}

} // namespace morphcloud
