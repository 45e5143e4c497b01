/** Scene -> SVG text. Fixed styling; output depends only on the scene. */

import type { Scene } from "./scene.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function sceneToSvg(scene: Scene): string {
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
    `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
  );
  for (const item of scene.items) {
    switch (item.kind) {
      case "rect":
        out.push(
          `<rect x="${item.x}" y="${item.y}" width="${item.w}" height="${item.h}" ` +
          `fill="${item.color}"/>`,
        );
        break;
      case "line":
        out.push(
          `<line x1="${item.x1}" y1="${item.y1}" x2="${item.x2}" y2="${item.y2}" ` +
          `stroke="${item.color}" stroke-width="1"/>`,
        );
        break;
      case "polyline": {
        const points = item.points.map(([x, y]) => `${x},${y}`).join(" ");
        out.push(
          `<polyline points="${points}" fill="none" stroke="${item.color}" ` +
          `stroke-width="1.25"/>`,
        );
        break;
      }
      case "text":
        out.push(
          `<text x="${item.x}" y="${item.y}" font-family="monospace" ` +
          `font-size="10" fill="${item.color}">${esc(item.text)}</text>`,
        );
        break;
      case "begin-panel":
        out.push(`<g class="panel" data-name="${esc(item.name)}">`);
        break;
      case "end-panel":
        out.push("</g>");
        break;
    }
  }
  out.push("</svg>");
  return out.join("\n") + "\n";
}
