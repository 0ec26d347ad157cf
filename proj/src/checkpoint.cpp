#include "faprune/checkpoint.hpp"

#include <cstring>

#include "faprune/errors.hpp"
#include "faprune/io.hpp"

namespace faprune {

namespace {

constexpr char kMagic[8] = {'F', 'A', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void put_f32(std::string& out, float v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n, const char* what) const {
        if (pos + n > buf.size())
            throw FormatError(std::string("checkpoint truncated while reading ") + what);
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, buf.data() + pos, 4);
        pos += 4;
        return v;
    }
    float f32(const char* what) {
        need(4, what);
        float v;
        std::memcpy(&v, buf.data() + pos, 4);
        pos += 4;
        return v;
    }
};

} // namespace

void save_checkpoint(const Model& model, const std::string& path) {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    put_u32(out, static_cast<std::uint32_t>(model.input_shape[0]));
    put_u32(out, static_cast<std::uint32_t>(model.input_shape[1]));
    put_u32(out, static_cast<std::uint32_t>(model.input_shape[2]));
    for (const auto& layer : model.layers) {
        if (const auto* cv = std::get_if<ConvLayerT<float>>(&layer)) {
            out.push_back(0);
            put_u32(out, static_cast<std::uint32_t>(cv->out_channels()));
            put_u32(out, static_cast<std::uint32_t>(cv->in_channels()));
            put_u32(out, static_cast<std::uint32_t>(cv->kernel()));
            put_u32(out, static_cast<std::uint32_t>(cv->stride));
            put_u32(out, static_cast<std::uint32_t>(cv->padding));
            for (float v : cv->weights.data) put_f32(out, v);
            for (float v : cv->bias) put_f32(out, v);
            for (const FilterInfo& fi : cv->filters) {
                out.push_back(static_cast<char>(fi.state));
                put_u32(out, static_cast<std::uint32_t>(fi.attenuation_count));
                put_u32(out, static_cast<std::uint32_t>(fi.recovery_count));
            }
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            out.push_back(1);
        } else if (std::holds_alternative<MaxPoolLayer>(layer)) {
            out.push_back(2);
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            out.push_back(3);
        } else {
            const auto& dn = std::get<DenseLayerT<float>>(layer);
            out.push_back(4);
            put_u32(out, static_cast<std::uint32_t>(dn.out_dim()));
            put_u32(out, static_cast<std::uint32_t>(dn.in_dim()));
            for (float v : dn.weights.data) put_f32(out, v);
            for (float v : dn.bias) put_f32(out, v);
        }
    }
    atomic_write_file(path, out);
}

Model load_checkpoint(const std::string& path) {
    const std::string buf = read_text_file(path);
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path + ": not a model checkpoint (bad magic)");
    Reader rd{buf, sizeof(kMagic)};

    Model model;
    const std::uint32_t layer_count = rd.u32("layer count");
    model.input_shape[0] = static_cast<int>(rd.u32("input channels"));
    model.input_shape[1] = static_cast<int>(rd.u32("input height"));
    model.input_shape[2] = static_cast<int>(rd.u32("input width"));
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        const std::uint8_t tag = rd.u8("layer tag");
        switch (tag) {
        case 0: {
            const int f = static_cast<int>(rd.u32("conv f_out"));
            const int c = static_cast<int>(rd.u32("conv c_in"));
            const int k = static_cast<int>(rd.u32("conv kernel"));
            const int stride = static_cast<int>(rd.u32("conv stride"));
            const int pad = static_cast<int>(rd.u32("conv padding"));
            if (f < 1 || c < 1 || k < 1 || stride < 1 || pad < 0)
                throw FormatError(path + ": invalid conv geometry in checkpoint");
            ConvLayerT<float> cv(f, c, k, stride, pad);
            for (auto& v : cv.weights.data) v = rd.f32("conv weights");
            for (auto& v : cv.bias) v = rd.f32("conv bias");
            for (auto& fi : cv.filters) {
                const std::uint8_t s = rd.u8("filter state");
                if (s > 2) throw FormatError(path + ": invalid filter state in checkpoint");
                fi.state = static_cast<FilterState>(s);
                fi.attenuation_count = static_cast<int>(rd.u32("attenuation count"));
                fi.recovery_count = static_cast<int>(rd.u32("recovery count"));
            }
            model.layers.push_back(std::move(cv));
            break;
        }
        case 1: model.layers.push_back(ReluLayer{}); break;
        case 2: model.layers.push_back(MaxPoolLayer{}); break;
        case 3: model.layers.push_back(FlattenLayer{}); break;
        case 4: {
            const int o = static_cast<int>(rd.u32("dense out"));
            const int in = static_cast<int>(rd.u32("dense in"));
            if (o < 1 || in < 1) throw FormatError(path + ": invalid dense geometry");
            DenseLayerT<float> dn(o, in);
            for (auto& v : dn.weights.data) v = rd.f32("dense weights");
            for (auto& v : dn.bias) v = rd.f32("dense bias");
            model.layers.push_back(std::move(dn));
            break;
        }
        default: throw FormatError(path + ": unknown layer tag " + std::to_string(tag));
        }
    }
    if (rd.pos != buf.size()) throw FormatError(path + ": trailing bytes after checkpoint");
    try {
        validate_model(model);
    } catch (const std::exception& e) {
        throw FormatError(path + ": inconsistent checkpoint: " + e.what());
    }
    return model;
}

} // namespace faprune
