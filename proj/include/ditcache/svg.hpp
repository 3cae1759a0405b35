#ifndef DITCACHE_SVG_HPP_
#define DITCACHE_SVG_HPP_

#include <string>
#include <vector>

namespace ditcache {

// Minimal self-contained line-plot emitter. Output is deterministic for
// identical inputs, so plot files participate in the byte-identical rerun
// guarantee like the CSVs.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_series(std::string name,
                    const std::vector<double>& xs,
                    const std::vector<double>& ys);

    std::string render() const;
    void save(const std::string& path) const;

private:
    struct Series {
        std::string name;
        std::vector<double> xs;
        std::vector<double> ys;
    };

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<Series> series_;
};

}  // namespace ditcache

#endif  // DITCACHE_SVG_HPP_
