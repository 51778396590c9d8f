// Dependency-free station map: an equirectangular lat/lon scatter with
// selectable markers. Marker interaction is wired by the app shell via the
// data-station attributes.

import { escapeHtml } from "./format.js";
import type { Station } from "./types.js";

const W = 720;
const H = 360;

export function project(latitude: number, longitude: number): { x: number; y: number } {
  return {
    x: ((longitude + 180) / 360) * W,
    y: ((90 - latitude) / 180) * H,
  };
}

function graticule(): string {
  const lines: string[] = [];
  for (let lon = -180; lon <= 180; lon += 30) {
    const { x } = project(0, lon);
    lines.push(`<line class="grat" x1="${x.toFixed(1)}" y1="0" x2="${x.toFixed(1)}" y2="${H}"/>`);
  }
  for (let lat = -60; lat <= 60; lat += 30) {
    const { y } = project(lat, 0);
    lines.push(`<line class="grat" x1="0" y1="${y.toFixed(1)}" x2="${W}" y2="${y.toFixed(1)}"/>`);
  }
  return lines.join("");
}

export interface MapOptions {
  selected?: string | null;
  picked?: string[];
  focus?: boolean; // zoom to the stations' bounding box
}

export function renderStationMap(stations: Station[], options: MapOptions = {}): string {
  const picked = new Set(options.picked ?? []);
  let viewBox = `0 0 ${W} ${H}`;
  if (options.focus && stations.length > 0) {
    const xs = stations.map((s) => project(s.latitude, s.longitude).x);
    const ys = stations.map((s) => project(s.latitude, s.longitude).y);
    const margin = 24;
    const x0 = Math.max(0, Math.min(...xs) - margin);
    const y0 = Math.max(0, Math.min(...ys) - margin);
    const x1 = Math.min(W, Math.max(...xs) + margin);
    const y1 = Math.min(H, Math.max(...ys) + margin);
    viewBox = `${x0.toFixed(1)} ${y0.toFixed(1)} ${(x1 - x0).toFixed(1)} ${(y1 - y0).toFixed(1)}`;
  }
  const markers = stations
    .map((s) => {
      const { x, y } = project(s.latitude, s.longitude);
      const classes = ["marker"];
      if (s.station_id === options.selected) classes.push("marker-selected");
      if (picked.has(s.station_id)) classes.push("marker-picked");
      const title = `${s.station_id} ${s.name}`;
      return (
        `<circle class="${classes.join(" ")}" data-station="${escapeHtml(s.station_id)}" ` +
        `cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="5"><title>${escapeHtml(title)}</title></circle>`
      );
    })
    .join("");
  return (
    `<svg class="station-map" viewBox="${viewBox}" role="img" aria-label="station map">` +
    `<rect class="map-bg" x="0" y="0" width="${W}" height="${H}"/>` +
    graticule() +
    markers +
    `</svg>`
  );
}

export function externalMapLink(url: string, stationId: string): string {
  return `<a class="map-link" href="${escapeHtml(url)}" target="_blank" rel="noopener">open ${escapeHtml(stationId)} on an external map</a>`;
}
