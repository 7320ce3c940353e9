#ifndef SFLOW_RASTERIO_HPP
#define SFLOW_RASTERIO_HPP

#include <string>

#include "sflow/image.hpp"

namespace sflow {

// KITTI raster conventions, the only on-disk formats of the toolkit:
//   disparity: single-channel 16-bit PNG, stored = round(d * 256), 0 = invalid
//   flow:      three-channel 16-bit PNG, ch1 = round(u * 64 + 2^15),
//              ch2 = round(v * 64 + 2^15), ch3 > 0 marks valid pixels
// Frame pairs follow the KITTI naming scheme {frame}_10.png / {frame}_11.png
// under disp_0/, disp_1/ and flow/ directories.

DisparityMap readDisparity(const std::string& path);
void writeDisparity(const DisparityMap& map, const std::string& path);

FlowMap readFlow(const std::string& path);
void writeFlow(const FlowMap& map, const std::string& path);

// 8-bit grayscale or RGB PNG; RGB converts via luma 0.299 R + 0.587 G + 0.114 B.
GrayImage readGray(const std::string& path);

// Single-channel 8-bit PNG only; multi-channel input is a format error.
GrayImage readGrayStrict(const std::string& path);
void writeGray(const GrayImage& img, const std::string& path);

// 8-bit RGB PNG.
void writeColor(const ColorRaster& img, const std::string& path);

// Single-channel 8-bit PNG mask (255 = set). Used for occlusion / eval masks.
ScalarMap readMask(const std::string& path);
void writeMask(const ScalarMap& mask, const std::string& path);

}  // namespace sflow

#endif
