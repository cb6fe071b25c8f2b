#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrm {

// Flat parameter buffer with named, disjoint slices and a gradient buffer of
// identical layout. Single-writer mutation contract; reads may be concurrent.
class ParamStore {
public:
    struct Slice {
        std::string name;
        size_t offset = 0;
        size_t length = 0;
    };

    // Returns the offset of the new slice. Slices are allocated back to back,
    // so they are disjoint and cover the buffer by construction.
    size_t add_slice(const std::string& name, size_t length) {
        if (find(name) != nullptr) throw std::invalid_argument("ParamStore: duplicate slice " + name);
        const size_t offset = values_.size();
        slices_.push_back({name, offset, length});
        values_.resize(offset + length, 0.0);
        grads_.resize(offset + length, 0.0);
        return offset;
    }

    std::span<double> values(const std::string& name) {
        const Slice& s = get(name);
        return {values_.data() + s.offset, s.length};
    }
    std::span<const double> values(const std::string& name) const {
        const Slice& s = get(name);
        return {values_.data() + s.offset, s.length};
    }
    std::span<double> grads(const std::string& name) {
        const Slice& s = get(name);
        return {grads_.data() + s.offset, s.length};
    }
    std::span<const double> grads(const std::string& name) const {
        const Slice& s = get(name);
        return {grads_.data() + s.offset, s.length};
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& grads() { return grads_; }
    const std::vector<double>& grads() const { return grads_; }

    size_t size() const { return values_.size(); }
    const std::vector<Slice>& slices() const { return slices_; }

    const Slice& get(const std::string& name) const {
        const Slice* s = find(name);
        if (s == nullptr) throw std::invalid_argument("ParamStore: no slice named " + name);
        return *s;
    }

    bool has(const std::string& name) const { return find(name) != nullptr; }

    void zero_grads() {
        for (double& g : grads_) g = 0.0;
    }

    // Name of the slice containing flat index i.
    const std::string& slice_of(size_t i) const {
        for (const Slice& s : slices_)
            if (i >= s.offset && i < s.offset + s.length) return s.name;
        throw std::out_of_range("ParamStore: index outside buffer");
    }

private:
    const Slice* find(const std::string& name) const {
        for (const Slice& s : slices_)
            if (s.name == name) return &s;
        return nullptr;
    }

    std::vector<Slice> slices_;
    std::vector<double> values_;
    std::vector<double> grads_;
};

}  // namespace lrm
