/** Raised when an input file is missing, malformed, or incompatible. */
export class FigureInputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureInputError";
  }
}
