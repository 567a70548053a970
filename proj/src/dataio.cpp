#include "treise/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "treise/rng.hpp"
#include "treise/version.hpp"

namespace treise {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'R', 'S', 'E', 'A', 'R', 'T', '1'};
constexpr std::uint32_t kSchemaVersion = 1;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void str(const std::string& s) {
        u64(s.size());
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    void doubles(std::span<const double> vs) {
        for (double v : vs) f64(v);
    }
    void raw(const char* data, std::size_t n) {
        buf_.insert(buf_.end(), data, data + n);
    }
    std::vector<unsigned char>& buffer() { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class ByteReader {
public:
    ByteReader(const unsigned char* data, std::size_t n) : data_(data), size_(n) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const std::uint64_t n = u64();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    void doubles(std::span<double> out) {
        for (double& v : out) v = f64();
    }
    std::size_t remaining() const { return size_ - pos_; }

private:
    void need(std::uint64_t n) {
        if (pos_ + n > size_) throw FormatError("artifact: payload truncated");
    }
    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

json make_meta(const Provenance& provenance) {
    json meta;
    meta["tool"] = "treise";
    meta["tool_version"] = kVersion;
    try {
        meta["provenance"] = provenance.empty() ? json::object() : json::parse(provenance);
    } catch (const json::exception&) {
        meta["provenance"] = provenance;  // keep as opaque string
    }
    return meta;
}

void save_artifact(const std::filesystem::path& path, ArtifactKind kind,
                   const Provenance& provenance,
                   const std::function<void(ByteWriter&)>& payload) {
    ByteWriter w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kSchemaVersion);
    w.u32(static_cast<std::uint32_t>(kind));
    w.str(make_meta(provenance).dump());
    payload(w);
    const std::uint64_t sum = fnv1a(w.buffer().data(), w.buffer().size());
    w.u64(sum);
    write_file_bytes(path, w.buffer());
}

// Validates magic, version, checksum and kind; returns a reader positioned at
// the payload plus the provenance block.
ByteReader open_artifact(const std::vector<unsigned char>& bytes, ArtifactKind expected,
                         std::string* meta_out = nullptr,
                         ArtifactKind* kind_out = nullptr) {
    if (bytes.size() < sizeof kMagic + 4 + 4 + 8 + 8)
        throw FormatError("artifact: file too short");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw FormatError("artifact: bad magic");
    const std::uint64_t stored =
        ByteReader(bytes.data() + bytes.size() - 8, 8).u64();
    if (stored != fnv1a(bytes.data(), bytes.size() - 8))
        throw FormatError("artifact: checksum mismatch (corrupt or truncated file)");
    ByteReader r(bytes.data(), bytes.size() - 8);
    char magic[8];
    for (char& c : magic) c = static_cast<char>(r.u8());
    const std::uint32_t version = r.u32();
    if (version != kSchemaVersion)
        throw FormatError("artifact: unsupported schema version " + std::to_string(version));
    const auto kind = static_cast<ArtifactKind>(r.u32());
    if (kind_out) *kind_out = kind;
    const std::string meta = r.str();
    if (meta_out) *meta_out = meta;
    if (expected != static_cast<ArtifactKind>(0) && kind != expected)
        throw FormatError("artifact: unexpected kind");
    return r;
}

double parse_number(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("non-numeric field '" + field + "'", line_no);
    if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

Matrix GroundTruthMap::to_matrix(std::size_t channels, std::size_t timesteps) const {
    Matrix m(channels, timesteps, 0.0);
    m(static_cast<std::size_t>(channel), static_cast<std::size_t>(timestep)) = 1.0;
    return m;
}

AnomalyData generate_anomaly_dataset(const AnomalyGenSpec& spec) {
    if (spec.n_train < 1 || spec.n_test < 1)
        throw InvalidSpecError("anomaly generator: splits must be non-empty");
    if (spec.channels < 1 || spec.timesteps < 1)
        throw InvalidSpecError("anomaly generator: bad shape");
    if (!(spec.noise_sigma > 0.0))
        throw InvalidSpecError("anomaly generator: noise sigma must be positive");
    if (!(spec.spike_min > 0.0) || spec.spike_max < spec.spike_min)
        throw InvalidSpecError("anomaly generator: bad spike magnitude range");
    if (spec.anomaly_rate < 0.0 || spec.anomaly_rate > 1.0)
        throw InvalidSpecError("anomaly generator: anomaly rate must lie in [0,1]");

    const Rng root(spec.seed);
    std::vector<GroundTruthMap> truth;

    auto make_split = [&](int split, int count) {
        const Rng split_stream = root.child(static_cast<std::uint64_t>(split));
        std::vector<TimeSeriesSample> samples;
        samples.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            Rng rng = split_stream.child(static_cast<std::uint64_t>(i));
            const bool anomalous = rng.uniform() < spec.anomaly_rate;
            Matrix values(static_cast<std::size_t>(spec.channels),
                          static_cast<std::size_t>(spec.timesteps));
            for (double& v : values.data()) v = rng.gaussian() * spec.noise_sigma;
            if (anomalous) {
                const auto c = static_cast<std::size_t>(
                    rng.uniform_below(static_cast<std::uint64_t>(spec.channels)));
                const auto t = static_cast<std::size_t>(
                    rng.uniform_below(static_cast<std::uint64_t>(spec.timesteps)));
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                const double mag = rng.uniform(spec.spike_min, spec.spike_max);
                values(c, t) = sign * mag * spec.noise_sigma;
                truth.push_back(GroundTruthMap{split, i, static_cast<int>(c),
                                               static_cast<int>(t)});
            }
            samples.emplace_back(std::move(values), anomalous ? 1 : 0);
        }
        return Dataset(std::move(samples), 2, "anomaly");
    };

    Dataset train = make_split(0, spec.n_train);
    Dataset test = make_split(1, spec.n_test);
    return AnomalyData{std::move(train), std::move(test), std::move(truth)};
}

Dataset parse_univariate_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<double> raw_labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_fields = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (fields.size() < 2)
            throw ParseError("expected a label and at least one value", line_no);
        if (expected_fields == 0)
            expected_fields = fields.size();
        else if (fields.size() != expected_fields)
            throw ParseError("ragged row: expected " + std::to_string(expected_fields) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_no);
        raw_labels.push_back(parse_number(fields[0], line_no));
        std::vector<double> values;
        values.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i)
            values.push_back(parse_number(fields[i], line_no));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw ParseError("empty file: " + path.string());

    // Dense re-index preserving sorted original order.
    std::map<double, int> index;
    for (double l : raw_labels) index.emplace(l, 0);
    int next = 0;
    for (auto& [key, value] : index) value = next++;

    std::vector<TimeSeriesSample> samples;
    samples.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Matrix m(1, rows[i].size());
        std::copy(rows[i].begin(), rows[i].end(), m.data().begin());
        samples.emplace_back(std::move(m), index.at(raw_labels[i]));
    }
    return Dataset(std::move(samples), next, path.stem().string());
}

void write_univariate_tsv(const std::filesystem::path& path, const Dataset& d) {
    if (d.channels() != 1)
        throw InvalidInputError("tsv writer: only univariate datasets");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& s : d.samples()) {
        if (!s.label()) throw InvalidInputError("tsv writer: sample without label");
        out << *s.label();
        for (std::size_t t = 0; t < s.timesteps(); ++t)
            out << '\t' << format_double(s.values()(0, t));
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Dataset parse_multivariate_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<TimeSeriesSample> samples;
    std::string line;
    std::size_t line_no = 0;
    std::size_t channels = 0, timesteps = 0;
    int max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        if (!obj.is_object() || !obj.contains("label") || !obj.contains("values"))
            throw ParseError("object with 'label' and 'values' required", line_no);
        if (!obj["label"].is_number_integer() || obj["label"].get<int>() < 0)
            throw ParseError("'label' must be a nonnegative integer", line_no);
        const auto& values = obj["values"];
        if (!values.is_array() || values.empty())
            throw ParseError("'values' must be a non-empty array of channel arrays", line_no);
        if (channels == 0) {
            channels = values.size();
            if (!values[0].is_array() || values[0].empty())
                throw ParseError("'values' must contain arrays", line_no);
            timesteps = values[0].size();
        } else if (values.size() != channels) {
            throw ParseError("channel count mismatch: expected " + std::to_string(channels) +
                                 ", got " + std::to_string(values.size()),
                             line_no);
        }
        Matrix m(channels, timesteps);
        for (std::size_t c = 0; c < channels; ++c) {
            const auto& row = values[c];
            if (!row.is_array() || row.size() != timesteps)
                throw ParseError("timestep count mismatch in channel " + std::to_string(c),
                                 line_no);
            for (std::size_t t = 0; t < timesteps; ++t) {
                if (!row[t].is_number())
                    throw ParseError("non-numeric value in channel " + std::to_string(c),
                                     line_no);
                m(c, t) = row[t].get<double>();
            }
        }
        const int label = obj["label"].get<int>();
        max_label = std::max(max_label, label);
        samples.emplace_back(std::move(m), label);
    }
    if (samples.empty()) throw ParseError("empty file: " + path.string());
    return Dataset(std::move(samples), max_label + 1, path.stem().string());
}

void write_multivariate_jsonl(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& s : d.samples()) {
        if (!s.label()) throw InvalidInputError("jsonl writer: sample without label");
        json obj;
        obj["label"] = *s.label();
        json values = json::array();
        for (std::size_t c = 0; c < s.channels(); ++c) {
            json row = json::array();
            for (std::size_t t = 0; t < s.timesteps(); ++t) row.push_back(s.values()(c, t));
            values.push_back(std::move(row));
        }
        obj["values"] = std::move(values);
        out << obj.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_ground_truth_jsonl(const std::filesystem::path& path,
                              const std::vector<GroundTruthMap>& truth) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& g : truth) {
        json obj = {{"split", g.split},
                    {"sample", g.sample_index},
                    {"channel", g.channel},
                    {"timestep", g.timestep}};
        out << obj.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<GroundTruthMap> parse_ground_truth_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<GroundTruthMap> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
        }
        out.push_back(GroundTruthMap{obj.at("split").get<int>(), obj.at("sample").get<int>(),
                                     obj.at("channel").get<int>(),
                                     obj.at("timestep").get<int>()});
    }
    return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& d,
                  const Provenance& provenance) {
    save_artifact(path, ArtifactKind::Dataset, provenance, [&](ByteWriter& w) {
        w.u64(d.size());
        w.u64(d.channels());
        w.u64(d.timesteps());
        w.u32(static_cast<std::uint32_t>(d.num_classes()));
        w.str(d.name());
        for (const auto& s : d.samples()) {
            w.u8(s.label() ? 1 : 0);
            w.i32(s.label() ? *s.label() : -1);
            w.doubles(s.values().data());
        }
    });
}

Dataset load_dataset(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r = open_artifact(bytes, ArtifactKind::Dataset);
    const std::uint64_t n = r.u64();
    const std::uint64_t channels = r.u64();
    const std::uint64_t timesteps = r.u64();
    const auto num_classes = static_cast<int>(r.u32());
    const std::string name = r.str();
    if (n == 0) throw FormatError("dataset artifact: empty");
    std::vector<TimeSeriesSample> samples;
    samples.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const bool has_label = r.u8() != 0;
        const std::int32_t label = r.i32();
        Matrix m(channels, timesteps);
        r.doubles(m.data());
        try {
            samples.emplace_back(std::move(m),
                                 has_label ? std::optional<int>(label) : std::nullopt);
        } catch (const InvalidInputError& e) {
            throw FormatError(std::string("dataset artifact: ") + e.what());
        }
    }
    try {
        return Dataset(std::move(samples), num_classes, name);
    } catch (const InvalidInputError& e) {
        throw FormatError(std::string("dataset artifact: ") + e.what());
    }
}

void save_maskset(const std::filesystem::path& path, const MaskSet& m,
                  const Provenance& provenance) {
    save_artifact(path, ArtifactKind::MaskSet, provenance, [&](ByteWriter& w) {
        w.u64(m.channels());
        w.u64(m.timesteps());
        w.u64(m.densities().size());
        w.u64(m.granularities().size());
        w.i32(m.per_combo_count());
        w.u8(m.channel_joint() ? 1 : 0);
        w.u64(m.seed());
        for (double p : m.densities()) w.f64(p);
        for (int g : m.granularities()) w.i32(g);
        for (const auto& mask : m.masks()) {
            w.f64(mask.density);
            w.i32(mask.granularity);
            w.doubles(mask.values.data());
        }
    });
}

MaskSet load_maskset(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r = open_artifact(bytes, ArtifactKind::MaskSet);
    const std::uint64_t channels = r.u64();
    const std::uint64_t timesteps = r.u64();
    const std::uint64_t np = r.u64();
    const std::uint64_t ng = r.u64();
    const std::int32_t per_combo = r.i32();
    const bool channel_joint = r.u8() != 0;
    const std::uint64_t seed = r.u64();
    std::vector<double> densities(np);
    for (double& p : densities) p = r.f64();
    std::vector<int> granularities(ng);
    for (int& g : granularities) g = r.i32();
    const std::uint64_t count = np * ng * static_cast<std::uint64_t>(per_combo);
    std::vector<Mask> masks;
    masks.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Mask mask;
        mask.density = r.f64();
        mask.granularity = r.i32();
        mask.values = Matrix(channels, timesteps);
        r.doubles(mask.values.data());
        masks.push_back(std::move(mask));
    }
    try {
        // Occurrence is recomputed by the constructor, which also re-checks
        // the cardinality and range invariants.
        return MaskSet(std::move(masks), std::move(densities), std::move(granularities),
                       per_combo, channel_joint, seed);
    } catch (const InvalidInputError& e) {
        throw FormatError(std::string("maskset artifact: ") + e.what());
    }
}

void save_attribution_map(const std::filesystem::path& path, const AttributionMap& m,
                          const Provenance& provenance) {
    save_artifact(path, ArtifactKind::AttributionMap, provenance, [&](ByteWriter& w) {
        w.u64(m.scores().rows());
        w.u64(m.scores().cols());
        w.u8(m.degenerate() ? 1 : 0);
        w.i32(m.target_class());
        w.str(m.method());
        w.doubles(m.scores().data());
    });
}

AttributionMap load_attribution_map(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r = open_artifact(bytes, ArtifactKind::AttributionMap);
    const std::uint64_t channels = r.u64();
    const std::uint64_t timesteps = r.u64();
    const bool degenerate = r.u8() != 0;
    const std::int32_t target = r.i32();
    const std::string method = r.str();
    Matrix scores(channels, timesteps);
    r.doubles(scores.data());
    try {
        return AttributionMap(std::move(scores), degenerate, method, target);
    } catch (const InvalidInputError& e) {
        throw FormatError(std::string("attribution artifact: ") + e.what());
    }
}

void save_metric_summary(const std::filesystem::path& path, const MetricSummary& s,
                         const Provenance& provenance) {
    json payload;
    payload["dataset_names"] = s.dataset_names;
    payload["method_names"] = s.method_names;
    payload["subset_size"] = s.subset_size;
    payload["auc_basis"] = s.auc_basis;
    json metrics = json::object();
    for (const auto& [name, table] : s.metrics) {
        json rows = json::array();
        for (const auto& row : table) {
            json cells = json::array();
            for (const auto& cell : row)
                cells.push_back({{"value", cell.value},
                                 {"seed", cell.seed},
                                 {"sample_ids", cell.sample_ids}});
            rows.push_back(std::move(cells));
        }
        metrics[name] = std::move(rows);
    }
    payload["metrics"] = std::move(metrics);
    save_artifact(path, ArtifactKind::MetricSummary, provenance,
                  [&](ByteWriter& w) { w.str(payload.dump()); });
}

MetricSummary load_metric_summary(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r = open_artifact(bytes, ArtifactKind::MetricSummary);
    json payload;
    try {
        payload = json::parse(r.str());
    } catch (const json::exception& e) {
        throw FormatError(std::string("summary artifact: malformed payload: ") + e.what());
    }
    MetricSummary s;
    try {
        s.dataset_names = payload.at("dataset_names").get<std::vector<std::string>>();
        s.method_names = payload.at("method_names").get<std::vector<std::string>>();
        s.subset_size = payload.at("subset_size").get<int>();
        s.auc_basis = payload.at("auc_basis").get<std::string>();
        for (const auto& [name, rows] : payload.at("metrics").items()) {
            std::vector<std::vector<MetricCell>> table;
            for (const auto& row : rows) {
                std::vector<MetricCell> cells;
                for (const auto& c : row) {
                    MetricCell cell;
                    cell.value = c.at("value").get<double>();
                    cell.seed = c.at("seed").get<std::uint64_t>();
                    cell.sample_ids = c.at("sample_ids").get<std::vector<int>>();
                    cells.push_back(std::move(cell));
                }
                table.push_back(std::move(cells));
            }
            s.metrics[name] = std::move(table);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("summary artifact: ") + e.what());
    }
    for (const auto& [name, table] : s.metrics) {
        if (table.size() != s.dataset_names.size())
            throw FormatError("summary artifact: dataset rows mismatch in " + name);
        for (const auto& row : table)
            if (row.size() != s.method_names.size())
                throw FormatError("summary artifact: method columns mismatch in " + name);
    }
    return s;
}

void save_linear_classifier(const std::filesystem::path& path,
                            const LinearSoftmaxClassifier& clf, const Provenance& provenance) {
    save_artifact(path, ArtifactKind::Classifier, provenance, [&](ByteWriter& w) {
        w.u32(static_cast<std::uint32_t>(clf.num_classes()));
        w.u64(clf.input_shape().channels);
        w.u64(clf.input_shape().timesteps);
        for (const auto& wk : clf.weights()) w.doubles(wk.data());
        w.doubles(clf.bias());
    });
}

LinearSoftmaxClassifier load_linear_classifier(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ByteReader r = open_artifact(bytes, ArtifactKind::Classifier);
    const auto k = static_cast<int>(r.u32());
    const std::uint64_t channels = r.u64();
    const std::uint64_t timesteps = r.u64();
    if (k < 2 || channels < 1 || timesteps < 1)
        throw FormatError("classifier artifact: bad header");
    std::vector<Matrix> weights(static_cast<std::size_t>(k), Matrix(channels, timesteps));
    for (auto& wk : weights) r.doubles(wk.data());
    std::vector<double> bias(static_cast<std::size_t>(k));
    for (double& b : bias) b = r.f64();
    LinearSoftmaxClassifier clf(k, Shape{channels, timesteps});
    clf.set_parameters(std::move(weights), std::move(bias));
    return clf;
}

Provenance read_artifact_provenance(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    std::string meta;
    open_artifact(bytes, static_cast<ArtifactKind>(0), &meta);
    return meta;
}

ArtifactKind read_artifact_kind(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    ArtifactKind kind{};
    open_artifact(bytes, static_cast<ArtifactKind>(0), nullptr, &kind);
    return kind;
}

}  // namespace treise
