/** Slippy-map tile math and viewport layout for the offer map.
 *
 * The tile source is a configurable URL template (``{z}/{x}/{y}``); the
 * default points at the public community tile server.
 */

export const DEFAULT_TILE_TEMPLATE = "https://tile.openstreetmap.org/{z}/{x}/{y}.png";
export const TILE_SIZE = 256;

export function lonToTileX(lon: number, zoom: number): number {
  return ((lon + 180) / 360) * 2 ** zoom;
}

export function latToTileY(lat: number, zoom: number): number {
  const rad = (lat * Math.PI) / 180;
  return ((1 - Math.asinh(Math.tan(rad)) / Math.PI) / 2) * 2 ** zoom;
}

export function tileXToLon(x: number, zoom: number): number {
  return (x / 2 ** zoom) * 360 - 180;
}

export function tileYToLat(y: number, zoom: number): number {
  const n = Math.PI - (2 * Math.PI * y) / 2 ** zoom;
  return (180 / Math.PI) * Math.atan(Math.sinh(n));
}

export function tileUrl(template: string, z: number, x: number, y: number): string {
  const max = 2 ** z;
  const wrappedX = ((x % max) + max) % max;
  return template
    .replace("{z}", String(z))
    .replace("{x}", String(wrappedX))
    .replace("{y}", String(y));
}

export interface TilePlacement {
  url: string;
  left: number;
  top: number;
}

export interface ViewportLayout {
  tiles: TilePlacement[];
  /** Projects a coordinate to viewport pixels (origin top-left). */
  project: (lat: number, lon: number) => { x: number; y: number };
}

export function viewportLayout(
  centerLat: number,
  centerLon: number,
  zoom: number,
  widthPx: number,
  heightPx: number,
  template: string = DEFAULT_TILE_TEMPLATE,
): ViewportLayout {
  const centerX = lonToTileX(centerLon, zoom);
  const centerY = latToTileY(centerLat, zoom);
  const originX = centerX * TILE_SIZE - widthPx / 2; // pixel origin of the viewport
  const originY = centerY * TILE_SIZE - heightPx / 2;

  const firstTileX = Math.floor(originX / TILE_SIZE);
  const firstTileY = Math.floor(originY / TILE_SIZE);
  const lastTileX = Math.floor((originX + widthPx) / TILE_SIZE);
  const lastTileY = Math.floor((originY + heightPx) / TILE_SIZE);
  const maxIndex = 2 ** zoom - 1;

  const tiles: TilePlacement[] = [];
  for (let ty = Math.max(0, firstTileY); ty <= Math.min(maxIndex, lastTileY); ty++) {
    for (let tx = firstTileX; tx <= lastTileX; tx++) {
      tiles.push({
        url: tileUrl(template, zoom, tx, ty),
        left: tx * TILE_SIZE - originX,
        top: ty * TILE_SIZE - originY,
      });
    }
  }
  return {
    tiles,
    project: (lat, lon) => ({
      x: lonToTileX(lon, zoom) * TILE_SIZE - originX,
      y: latToTileY(lat, zoom) * TILE_SIZE - originY,
    }),
  };
}
