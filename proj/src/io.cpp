#include "symfuse/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <png.h>

namespace symfuse {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError(context + ": not a number: '" + s + "'");
    }
    if (pos != s.size()) throw DataError(context + ": trailing garbage in '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw DataError(context + ": not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw DataError(context + ": trailing garbage in '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

/// Reads key=value lines after a mandatory header, skipping blanks and
/// '#' comments.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::string& path,
                                                              const std::string& header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw DataError("'" + path + "': expected header '" + header + "'");
    }
    std::vector<std::pair<std::string, std::string>> kv;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("'" + path + "': expected key=value, got '" + line + "'");
        }
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

// ---------------------------------------------------------------- images --

int read_pnm_token(std::istream& in) {
    // skips whitespace and '#' comments between header tokens
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    in >> value;
    if (!in) throw DataError("PGM: truncated header");
    return value;
}

GrayImage load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw DataError("cannot open '" + path + "'");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DataError("PNG: decoder setup failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DataError("PNG: '" + path + "' is corrupt or truncated");
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DataError("PNG: '" + path + "' is not grayscale");
    }
    if (depth > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DataError("PNG: '" + path + "' has unsupported depth " + std::to_string(depth));
    }
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    GrayImage img(static_cast<int>(png_get_image_width(png, info)),
                  static_cast<int>(png_get_image_height(png, info)));
    std::vector<png_byte> row(png_get_rowbytes(png, info));
    for (int y = 0; y < img.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < img.width; ++x) img.at(x, y) = row[x] / 255.0;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) {
        throw DataError("PGM: unsupported format (want P2 or P5)");
    }
    const bool binary = magic[1] == '5';
    const int width = read_pnm_token(in);
    const int height = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (width < 1 || height < 1) throw DataError("PGM: bad dimensions");
    if (maxval > 255) {
        throw DataError("PGM: unsupported depth (maxval " + std::to_string(maxval) + ")");
    }
    if (maxval < 1) throw DataError("PGM: bad maxval");
    GrayImage img(width, height);
    if (binary) {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> bytes(img.size());
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
            throw DataError("PGM: truncated pixel data");
        }
        for (std::size_t i = 0; i < bytes.size(); ++i) img.pixels[i] = bytes[i] / 255.0;
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            const int v = read_pnm_token(in);
            if (v < 0 || v > maxval) throw DataError("PGM: sample out of range");
            img.pixels[i] = v / 255.0;
        }
    }
    return img;
}

GrayImage load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw DataError("cannot open '" + path + "'");
    char magic[8] = {};
    probe.read(magic, 8);
    probe.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(probe);
    const unsigned char png_sig[4] = {0x89, 'P', 'N', 'G'};
    if (std::equal(png_sig, png_sig + 4, reinterpret_cast<unsigned char*>(magic))) {
        probe.close();
        return load_png(path);
    }
    throw DataError("'" + path + "': unsupported image format (want PGM or PNG)");
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> bytes(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.pixels[i], 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("cannot write '" + path + "'");
}

// ----------------------------------------------------------------- scores --

namespace {
const char* kScoreHeader = "expert_id,shot_id,claim_id,score,quality,claim_quality,label";
}

std::vector<ScoreRecord> read_score_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("score CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kScoreHeader) {
        throw DataError("score CSV: bad header, want '" + std::string(kScoreHeader) + "'");
    }
    std::vector<ScoreRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        const std::string ctx = "score CSV line " + std::to_string(lineno);
        if (fields.size() != 7) throw DataError(ctx + ": expected 7 fields");
        ScoreRecord r;
        r.expert_id = fields[0];
        r.shot_id = fields[1];
        r.claim_id = fields[2];
        r.score = parse_double(fields[3], ctx);
        r.quality = parse_double(fields[4], ctx);
        r.claim_quality = parse_double(fields[5], ctx);
        r.label = fields[6];
        if (r.score < 0.0 || r.score > 1.0) {
            throw DataError(ctx + ": score " + fields[3] + " outside [0,1]");
        }
        if (r.quality < 0.0 || r.claim_quality < 0.0) {
            throw DataError(ctx + ": negative quality");
        }
        if (r.label != "genuine" && r.label != "impostor" && r.label != "unknown") {
            throw DataError(ctx + ": bad label '" + r.label + "'");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ScoreRecord> read_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_score_csv(in);
}

void write_score_csv(const std::vector<ScoreRecord>& records, std::ostream& out) {
    out << kScoreHeader << "\n";
    for (const auto& r : records) {
        out << r.expert_id << ',' << r.shot_id << ',' << r.claim_id << ','
            << format_double(r.score) << ',' << format_double(r.quality) << ','
            << format_double(r.claim_quality) << ',' << r.label << "\n";
    }
}

void write_score_csv(const std::vector<ScoreRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_score_csv(records, out);
    if (!out) throw DataError("cannot write '" + path + "'");
}

std::vector<LabeledPanel> panels_from_records(const std::vector<ScoreRecord>& records,
                                              bool labeled) {
    std::map<std::string, LabeledPanel> by_shot;
    std::map<std::string, std::set<std::string>> experts_seen;
    std::set<std::string> all_experts;
    std::vector<std::string> shot_order;
    for (const auto& r : records) {
        if (labeled) {
            if (r.label == "unknown") {
                throw DataError("shot '" + r.shot_id + "': label required");
            }
        }
        auto [it, inserted] = by_shot.try_emplace(r.shot_id);
        if (inserted) {
            it->second.shot_id = r.shot_id;
            it->second.label = r.label == "genuine" ? 1 : 0;
            shot_order.push_back(r.shot_id);
        } else if (labeled) {
            const int label = r.label == "genuine" ? 1 : 0;
            if (label != it->second.label) {
                throw DataError("shot '" + r.shot_id + "': conflicting labels");
            }
        }
        if (!experts_seen[r.shot_id].insert(r.expert_id).second) {
            throw DataError("shot '" + r.shot_id + "': duplicate expert '" + r.expert_id + "'");
        }
        all_experts.insert(r.expert_id);
        ExpertScore s;
        s.expert_id = r.expert_id;
        s.score = r.score;
        s.quality = r.quality;
        s.claim_quality = r.claim_quality;
        it->second.scores.push_back(std::move(s));
    }
    std::vector<LabeledPanel> panels;
    panels.reserve(shot_order.size());
    for (const auto& shot : shot_order) {
        auto& p = by_shot[shot];
        if (experts_seen[shot].size() != all_experts.size()) {
            throw DataError("shot '" + shot + "': incomplete expert panel");
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

std::vector<UserPanels> users_from_records(const std::vector<ScoreRecord>& records) {
    std::map<std::string, std::vector<ScoreRecord>> by_claim;
    for (const auto& r : records) by_claim[r.claim_id].push_back(r);
    std::vector<UserPanels> users;
    users.reserve(by_claim.size());
    for (auto& [claim, recs] : by_claim) {
        UserPanels u;
        u.user_id = claim;
        u.panels = panels_from_records(recs, true);
        users.push_back(std::move(u));
    }
    return users;
}

std::vector<Trial> trials_from_records(const std::vector<ScoreRecord>& records) {
    std::vector<Trial> trials;
    trials.reserve(records.size());
    for (const auto& r : records) {
        if (r.label == "unknown") {
            throw DataError("trial for shot '" + r.shot_id + "': label required");
        }
        Trial t;
        t.score = r.score;
        t.label = r.label == "genuine" ? TrialLabel::genuine : TrialLabel::impostor;
        t.finger_id = r.claim_id;
        t.shot_id = r.shot_id;
        trials.push_back(std::move(t));
    }
    return trials;
}

std::map<std::string, double> genuine_quality_by_finger(
    const std::vector<ScoreRecord>& records) {
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& r : records) {
        if (r.label != "genuine") continue;
        auto& [sum, n] = acc[r.claim_id];
        sum += quality_index(r.quality, r.claim_quality);
        ++n;
    }
    std::map<std::string, double> out;
    for (const auto& [finger, sn] : acc) out[finger] = sn.first / sn.second;
    return out;
}

// ------------------------------------------------------------------ model --

namespace {
const char* kModelHeader = "symfuse-model v1";
}

void save_model(const TrainedSupervisor& sup, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << kModelHeader << "\n";
    out << "training.nC=" << sup.n_client << "\n";
    out << "training.nI=" << sup.n_impostor << "\n";
    for (const auto& e : sup.experts) {
        out << "expert." << e.id << ".MC=" << format_double(e.client.bias) << "\n";
        out << "expert." << e.id << ".VC=" << format_double(e.client.variance) << "\n";
        out << "expert." << e.id << ".alphaC=" << format_double(e.client.alpha) << "\n";
        out << "expert." << e.id << ".MI=" << format_double(e.impostor.bias) << "\n";
        out << "expert." << e.id << ".VI=" << format_double(e.impostor.variance) << "\n";
        out << "expert." << e.id << ".alphaI=" << format_double(e.impostor.alpha) << "\n";
    }
    if (!out) throw DataError("cannot write '" + path + "'");
}

TrainedSupervisor load_model(const std::string& path) {
    TrainedSupervisor sup;
    std::map<std::string, ExpertModel> experts;
    std::vector<std::string> order;
    for (const auto& [key, value] : read_kv_file(path, kModelHeader)) {
        if (key == "training.nC") {
            sup.n_client = static_cast<int>(parse_long(value, path));
            continue;
        }
        if (key == "training.nI") {
            sup.n_impostor = static_cast<int>(parse_long(value, path));
            continue;
        }
        if (key.rfind("expert.", 0) != 0) throw DataError("'" + path + "': unknown key " + key);
        const auto last_dot = key.rfind('.');
        const std::string id = key.substr(7, last_dot - 7);
        const std::string param = key.substr(last_dot + 1);
        if (id.empty()) throw DataError("'" + path + "': bad key " + key);
        auto [it, inserted] = experts.try_emplace(id);
        if (inserted) {
            it->second.id = id;
            order.push_back(id);
        }
        const double v = parse_double(value, path);
        if (param == "MC") it->second.client.bias = v;
        else if (param == "VC") it->second.client.variance = v;
        else if (param == "alphaC") it->second.client.alpha = v;
        else if (param == "MI") it->second.impostor.bias = v;
        else if (param == "VI") it->second.impostor.variance = v;
        else if (param == "alphaI") it->second.impostor.alpha = v;
        else throw DataError("'" + path + "': unknown key " + key);
    }
    if (experts.empty()) throw DataError("'" + path + "': no experts in model");
    std::sort(order.begin(), order.end());
    for (const auto& id : order) {
        const ExpertModel& e = experts[id];
        if (e.client.variance <= 0 || e.impostor.variance <= 0) {
            throw NumericError("'" + path + "': expert '" + id + "' has non-positive variance");
        }
        sup.experts.push_back(e);
    }
    return sup;
}

// ----------------------------------------------------------------- config --

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    for (const auto& [key, value] : read_kv_file(path, "symfuse-config v1")) {
        if (key == "sigma1") cfg.quality.sigma1 = parse_double(value, path);
        else if (key == "sigma2") cfg.quality.sigma2 = parse_double(value, path);
        else if (key == "block_size") cfg.quality.block_size = static_cast<int>(parse_long(value, path));
        else if (key == "tau_s") cfg.quality.interest_threshold = parse_double(value, path);
        else if (key == "downsize_factor") cfg.quality.downsize_factor = static_cast<int>(parse_long(value, path));
        else if (key == "q_floor") cfg.fusion.quality_floor = parse_double(value, path);
        else if (key == "alpha_floor") cfg.fusion.alpha_floor = parse_double(value, path);
        else if (key == "q_max") cfg.fusion.quality_max = parse_double(value, path);
        else if (key == "adaptive") cfg.adaptive = parse_long(value, path) != 0;
        else if (key == "cascade_rule") {
            if (value == "sum") cfg.cascade_rule = FusionRule::sum;
            else if (value == "max") cfg.cascade_rule = FusionRule::max;
            else throw DataError("'" + path + "': cascade_rule must be sum or max");
        } else if (key == "cascade_thresholds") {
            cfg.cascade_thresholds.clear();
            for (const auto& part : split(value, ',')) {
                cfg.cascade_thresholds.push_back(parse_double(part, path));
            }
        } else if (key == "eval_groups") {
            cfg.eval_groups = static_cast<int>(parse_long(value, path));
        } else if (key == "jackknife_per_fold") {
            cfg.jackknife_per_fold = parse_long(value, path) != 0;
        } else {
            throw DataError("'" + path + "': unknown key '" + key + "'");
        }
    }
    return cfg;
}

}  // namespace symfuse
