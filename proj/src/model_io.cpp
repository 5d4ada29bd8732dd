// model_io.cpp - Parsing and serialization of model documents

#include "thirdq/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace thirdq::io {

namespace {

[[noreturn]] void schema_error(const std::string& msg)
{
    throw Error(ErrorKind::InvalidInput, "model schema: " + msg);
}

cplx complex_from_json(const json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        schema_error(what + " must be a [re, im] pair of numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
    }
}

CVector vector_from_json(const json& j, Eigen::Index size, const std::string& what)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
        schema_error(fmt::format("{} must be an array of {} complex entries", what, size));
    }
    CVector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v(i) = complex_from_json(j[static_cast<std::size_t>(i)], fmt::format("{}[{}]", what, i));
    }
    return v;
}

CMatrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        schema_error(fmt::format("{} must have {} rows", what, rows));
    }
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        m.row(r) = vector_from_json(j[static_cast<std::size_t>(r)], cols,
                                    fmt::format("{}[{}]", what, r)).transpose();
    }
    return m;
}

BosonicModel parse_model(const json& doc)
{
    if (!doc.is_object()) schema_error("document must be an object");
    static const std::set<std::string> known{"n", "H", "K", "channels", "forces", "name", "description"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) schema_error("unknown field \"" + key + "\"");
    }
    if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
        schema_error("\"n\" must be a positive integer");
    }
    if (!doc.contains("H")) schema_error("\"H\" is required");

    BosonicModel model;
    model.n = doc["n"].get<int>();
    const int n = model.n;
    model.H = matrix_from_json(doc["H"], n, n, "H");
    model.K = doc.contains("K") ? matrix_from_json(doc["K"], n, n, "K") : CMatrix(CMatrix::Zero(n, n));
    if (doc.contains("forces")) model.forces = vector_from_json(doc["forces"], n, "forces");

    if (doc.contains("channels")) {
        const json& chans = doc["channels"];
        if (!chans.is_array()) schema_error("\"channels\" must be an array");
        for (std::size_t mu = 0; mu < chans.size(); ++mu) {
            const json& c = chans[mu];
            const std::string tag = fmt::format("channels[{}]", mu);
            if (!c.is_object()) schema_error(tag + " must be an object");
            for (const auto& [key, _] : c.items()) {
                if (key != "l" && key != "k" && key != "offset" && key != "rate") {
                    schema_error(tag + " has unknown field \"" + key + "\"");
                }
            }
            LindbladChannel ch;
            ch.l = c.contains("l") ? vector_from_json(c["l"], n, tag + ".l") : CVector(CVector::Zero(n));
            ch.k = c.contains("k") ? vector_from_json(c["k"], n, tag + ".k") : CVector(CVector::Zero(n));
            if (c.contains("offset")) ch.offset = complex_from_json(c["offset"], tag + ".offset");
            if (c.contains("rate")) {
                if (!c["rate"].is_number()) schema_error(tag + ".rate must be a number");
                const double rate = c["rate"].get<double>();
                if (!(rate >= 0.0) || !std::isfinite(rate)) {
                    schema_error(tag + ".rate must be finite and non-negative");
                }
                const double s = std::sqrt(rate);
                ch.l *= s;
                ch.k *= s;
                ch.offset *= s;
            }
            model.channels.push_back(std::move(ch));
        }
    }
    return model;
}

json complex_to_json(cplx z)
{
    // + 0.0 turns -0 into +0
    return json::array({z.real() + 0.0, z.imag() + 0.0});
}

json vector_to_json(const CVector& v)
{
    json out = json::array();
    for (const auto& z : v) out.push_back(complex_to_json(z));
    return out;
}

json matrix_to_json(const CMatrix& m)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

json model_to_json(const BosonicModel& model)
{
    json doc;
    doc["n"] = model.n;
    doc["H"] = matrix_to_json(model.H);
    doc["K"] = matrix_to_json(model.K);
    doc["channels"] = json::array();
    for (const auto& c : model.channels) {
        json jc{{"l", vector_to_json(c.l)}, {"k", vector_to_json(c.k)}};
        if (c.offset != cplx{0.0, 0.0}) jc["offset"] = complex_to_json(c.offset);
        doc["channels"].push_back(std::move(jc));
    }
    if (model.forces) doc["forces"] = vector_to_json(*model.forces);
    return doc;
}

void set_parameter(json& doc, const std::string& path, double value)
{
    auto bad = [&](const std::string& why) -> void {
        throw Error(ErrorKind::InvalidInput, "bad parameter path \"" + path + "\": " + why);
    };
    json* node = &doc;
    std::size_t pos = 0;
    if (path.empty()) bad("empty path");
    while (pos < path.size()) {
        if (path[pos] == '.') {
            if (pos == 0) bad("leading '.'");
            ++pos;
        }
        if (pos < path.size() && path[pos] == '[') {
            const auto close = path.find(']', pos);
            if (close == std::string::npos) bad("unterminated '['");
            const std::string digits = path.substr(pos + 1, close - pos - 1);
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                               [](unsigned char ch) { return std::isdigit(ch); })) {
                bad("index must be a non-negative integer");
            }
            const auto idx = std::stoul(digits);
            if (!node->is_array() || idx >= node->size()) bad("index " + digits + " out of range");
            node = &(*node)[idx];
            pos = close + 1;
        } else {
            std::size_t end = pos;
            while (end < path.size() && path[end] != '.' && path[end] != '[') ++end;
            const std::string key = path.substr(pos, end - pos);
            if (key.empty()) bad("empty field name");
            if (!node->is_object() || !node->contains(key)) bad("no field \"" + key + "\"");
            node = &(*node)[key];
            pos = end;
        }
    }
    if (!node->is_number()) bad("does not address a number");
    *node = value;
}

std::string document_hash(const json& doc)
{
    const std::string text = doc.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace thirdq::io
