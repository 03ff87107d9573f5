"""
FastAPI main application - stateless analysis service
"""
import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from polarlab.config import BUILTIN_FAMILIES, MODES, VERSION
from polarlab.routers import channel, ensemble, mueller

logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="polarlab",
    description="Characteristic decomposition, antisymmetric Mueller generator and Pancharatnam phase "
                "of Mueller matrices and qubit channels",
    version=VERSION,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(mueller.router)
app.include_router(channel.router)
app.include_router(ensemble.router)


@app.on_event("startup")
async def startup_event():
    logger.info(f"polarlab {VERSION} started")
    logger.info("  API docs: http://localhost:8000/docs")


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "polarlab analysis API",
        "docs": "/docs",
        "version": VERSION,
        "modes": MODES,
        "families": BUILTIN_FAMILIES,
    }


@app.get("/health")
async def health():
    """Health check endpoint"""
    return {"status": "healthy"}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
