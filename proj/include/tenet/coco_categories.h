// Copyright 2026 The TENet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TENET_COCO_CATEGORIES_H_
#define TENET_COCO_CATEGORIES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace tenet {

struct CocoCategory {
  int id;
  std::string_view name;
};

// The 91 COCO object categories, ids 1..91. Eleven of them (street sign,
// hat, shoe, ...) never occur in the released instance annotations; their
// class slots exist but are never positive.
inline constexpr std::array<CocoCategory, 91> kCocoCategories = {{
    {1, "person"},         {2, "bicycle"},        {3, "car"},
    {4, "motorcycle"},     {5, "airplane"},       {6, "bus"},
    {7, "train"},          {8, "truck"},          {9, "boat"},
    {10, "traffic light"}, {11, "fire hydrant"},  {12, "street sign"},
    {13, "stop sign"},     {14, "parking meter"}, {15, "bench"},
    {16, "bird"},          {17, "cat"},           {18, "dog"},
    {19, "horse"},         {20, "sheep"},         {21, "cow"},
    {22, "elephant"},      {23, "bear"},          {24, "zebra"},
    {25, "giraffe"},       {26, "hat"},           {27, "backpack"},
    {28, "umbrella"},      {29, "shoe"},          {30, "eye glasses"},
    {31, "handbag"},       {32, "tie"},           {33, "suitcase"},
    {34, "frisbee"},       {35, "skis"},          {36, "snowboard"},
    {37, "sports ball"},   {38, "kite"},          {39, "baseball bat"},
    {40, "baseball glove"}, {41, "skateboard"},   {42, "surfboard"},
    {43, "tennis racket"}, {44, "bottle"},        {45, "plate"},
    {46, "wine glass"},    {47, "cup"},           {48, "fork"},
    {49, "knife"},         {50, "spoon"},         {51, "bowl"},
    {52, "banana"},        {53, "apple"},         {54, "sandwich"},
    {55, "orange"},        {56, "broccoli"},      {57, "carrot"},
    {58, "hot dog"},       {59, "pizza"},         {60, "donut"},
    {61, "cake"},          {62, "chair"},         {63, "couch"},
    {64, "potted plant"},  {65, "bed"},           {66, "mirror"},
    {67, "dining table"},  {68, "window"},        {69, "desk"},
    {70, "toilet"},        {71, "door"},          {72, "tv"},
    {73, "laptop"},        {74, "mouse"},         {75, "remote"},
    {76, "keyboard"},      {77, "cell phone"},    {78, "microwave"},
    {79, "oven"},          {80, "toaster"},       {81, "sink"},
    {82, "refrigerator"},  {83, "blender"},       {84, "book"},
    {85, "clock"},         {86, "vase"},          {87, "scissors"},
    {88, "teddy bear"},    {89, "hair drier"},    {90, "toothbrush"},
    {91, "hair brush"},
}};

// Bijection between COCO category ids and contiguous class indices, in
// ascending id order.
class ClassIndexMap {
 public:
  static constexpr std::int64_t kNumClasses = kCocoCategories.size();

  std::optional<std::int64_t> index_of(int category_id) const {
    for (std::size_t i = 0; i < kCocoCategories.size(); ++i) {
      if (kCocoCategories[i].id == category_id) {
        return static_cast<std::int64_t>(i);
      }
    }
    return std::nullopt;
  }

  // Throws std::out_of_range for indices outside [0, kNumClasses).
  int category_id(std::int64_t index) const {
    return kCocoCategories.at(static_cast<std::size_t>(index)).id;
  }
  std::string_view name(std::int64_t index) const {
    return kCocoCategories.at(static_cast<std::size_t>(index)).name;
  }
  std::int64_t size() const { return kNumClasses; }
};

inline ClassIndexMap class_index_map() { return {}; }

}  // namespace tenet

#endif  // TENET_COCO_CATEGORIES_H_
